#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

#include "blowup/csv.hpp"
#include "blowup/domain.hpp"
#include "blowup/error.hpp"

namespace blowup {

/// Shape of a sampled grid; ny == 1 for a line. Node (i, j) has index j*nx + i.
struct GridShape {
    std::size_t nx = 0;
    std::size_t ny = 1;

    std::size_t size() const noexcept { return nx * ny; }

    /// Axis neighbours only: 2 in 1D, 4 in 2D.
    template <class Fn>
    void for_each_neighbor(std::size_t k, Fn&& fn) const
    {
        const std::size_t i = k % nx;
        const std::size_t j = k / nx;
        if (i > 0)
            fn(k - 1);
        if (i + 1 < nx)
            fn(k + 1);
        if (j > 0)
            fn(k - nx);
        if (j + 1 < ny)
            fn(k + nx);
    }

    bool on_edge(std::size_t k) const noexcept
    {
        const std::size_t i = k % nx;
        const std::size_t j = k / nx;
        if (i == 0 || i + 1 == nx)
            return true;
        return ny > 1 && (j == 0 || j + 1 == ny);
    }
};

class RegionMask {
public:
    RegionMask() = default;
    RegionMask(GridShape shape, std::vector<std::uint8_t> cells) : shape_(shape), cells_(std::move(cells))
    {
        require(cells_.size() == shape_.size(), ErrorCode::InvalidArgument, "mask size does not match grid");
    }
    static RegionMask empty(GridShape shape) { return {shape, std::vector<std::uint8_t>(shape.size(), 0)}; }
    static RegionMask from_bools(const std::vector<bool>& b)
    {
        std::vector<std::uint8_t> cells(b.begin(), b.end());
        return {GridShape{b.size(), 1}, std::move(cells)};
    }

    const GridShape& shape() const noexcept { return shape_; }
    std::size_t size() const noexcept { return cells_.size(); }
    bool operator[](std::size_t k) const { return cells_[k] != 0; }
    void set(std::size_t k, bool v) { cells_[k] = v ? 1 : 0; }

    std::size_t count() const
    {
        return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), std::uint8_t{1}));
    }
    bool any() const { return count() > 0; }

    std::vector<std::size_t> indices() const
    {
        std::vector<std::size_t> out;
        for (std::size_t k = 0; k < cells_.size(); ++k)
            if (cells_[k])
                out.push_back(k);
        return out;
    }

    /// Overrides which nodes count as the domain boundary (default: grid edge).
    void set_domain_boundary(std::vector<bool> flags)
    {
        require(flags.size() == cells_.size(), ErrorCode::InvalidArgument, "boundary flags size mismatch");
        domain_edge_ = std::move(flags);
    }

    /// Mask nodes adjacent to a non-mask node or lying on the domain boundary.
    std::vector<std::size_t> boundary_nodes() const
    {
        std::vector<std::size_t> out;
        for (std::size_t k = 0; k < cells_.size(); ++k) {
            if (!cells_[k])
                continue;
            bool edge = domain_edge_.empty() ? shape_.on_edge(k) : static_cast<bool>(domain_edge_[k]);
            shape_.for_each_neighbor(k, [&](std::size_t nb) { edge = edge || !cells_[nb]; });
            if (edge)
                out.push_back(k);
        }
        return out;
    }

    bool subset_of(const RegionMask& other) const
    {
        for (std::size_t k = 0; k < cells_.size(); ++k)
            if (cells_[k] && !other.cells_[k])
                return false;
        return true;
    }

    /// Minimum number of nodes between the mask and the grid edge.
    std::size_t distance_to_edge() const
    {
        std::size_t best = std::numeric_limits<std::size_t>::max();
        for (std::size_t k = 0; k < cells_.size(); ++k) {
            if (!cells_[k])
                continue;
            const std::size_t i = k % shape_.nx;
            const std::size_t j = k / shape_.nx;
            best = std::min({best, i, shape_.nx - 1 - i});
            if (shape_.ny > 1)
                best = std::min({best, j, shape_.ny - 1 - j});
        }
        return best;
    }

    const std::vector<std::uint8_t>& cells() const noexcept { return cells_; }

private:
    GridShape shape_;
    std::vector<std::uint8_t> cells_;
    std::vector<bool> domain_edge_;
};

struct ComponentDecomposition {
    double threshold = 0.0;
    GridShape shape;
    /// -1 for nodes outside the sublevel set.
    std::vector<int> labels;
    std::vector<bool> touches_boundary;

    std::size_t component_count() const noexcept { return touches_boundary.size(); }

    RegionMask mask(int label) const
    {
        RegionMask m = RegionMask::empty(shape);
        for (std::size_t k = 0; k < labels.size(); ++k)
            if (labels[k] == label)
                m.set(k, true);
        return m;
    }
};

namespace detail {

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n), rank_(n, 0) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t x)
    {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::size_t a, std::size_t b)
    {
        a = find(a);
        b = find(b);
        if (a == b)
            return;
        if (rank_[a] < rank_[b])
            std::swap(a, b);
        parent_[b] = a;
        if (rank_[a] == rank_[b])
            ++rank_[a];
    }

private:
    std::vector<std::size_t> parent_;
    std::vector<unsigned char> rank_;
};

inline std::vector<bool> edge_flags(const GridShape& shape)
{
    std::vector<bool> flags(shape.size());
    for (std::size_t k = 0; k < shape.size(); ++k)
        flags[k] = shape.on_edge(k);
    return flags;
}

} // namespace detail

/// Connected components of {V <= threshold} (or {V < threshold} when
/// `strict`). Labels are numbered in order of first appearance.
inline ComponentDecomposition sublevel_components(const std::vector<double>& V, const GridShape& shape,
                                                  double threshold, const std::vector<bool>& on_domain_boundary,
                                                  bool strict = false)
{
    require(V.size() == shape.size(), ErrorCode::InvalidArgument, "potential samples do not match grid");
    require(on_domain_boundary.size() == shape.size(), ErrorCode::InvalidArgument, "boundary flags size mismatch");
    const auto inside = [&](std::size_t k) { return strict ? V[k] < threshold : V[k] <= threshold; };
    detail::UnionFind uf(V.size());
    for (std::size_t k = 0; k < V.size(); ++k) {
        if (!inside(k))
            continue;
        shape.for_each_neighbor(k, [&](std::size_t nb) {
            if (nb > k && inside(nb))
                uf.unite(k, nb);
        });
    }
    ComponentDecomposition dec;
    dec.threshold = threshold;
    dec.shape = shape;
    dec.labels.assign(V.size(), -1);
    std::vector<int> root_label(V.size(), -1);
    for (std::size_t k = 0; k < V.size(); ++k) {
        if (!inside(k))
            continue;
        const std::size_t r = uf.find(k);
        if (root_label[r] < 0) {
            root_label[r] = static_cast<int>(dec.touches_boundary.size());
            dec.touches_boundary.push_back(false);
        }
        const int label = root_label[r];
        dec.labels[k] = label;
        if (on_domain_boundary[k])
            dec.touches_boundary[static_cast<std::size_t>(label)] = true;
    }
    return dec;
}

inline ComponentDecomposition sublevel_components(const std::vector<double>& V, double threshold)
{
    const GridShape shape{V.size(), 1};
    return sublevel_components(V, shape, threshold, detail::edge_flags(shape));
}

inline ComponentDecomposition sublevel_components(const std::vector<double>& V, const GridShape& shape,
                                                  double threshold)
{
    return sublevel_components(V, shape, threshold, detail::edge_flags(shape));
}

/// Every component of `lower` lies inside exactly one component of `upper`
/// (lower threshold <= upper threshold).
inline bool components_nested(const ComponentDecomposition& lower, const ComponentDecomposition& upper)
{
    if (lower.labels.size() != upper.labels.size() || lower.threshold > upper.threshold)
        return false;
    std::vector<int> host(lower.component_count(), -1);
    for (std::size_t k = 0; k < lower.labels.size(); ++k) {
        const int l = lower.labels[k];
        if (l < 0)
            continue;
        const int u = upper.labels[k];
        if (u < 0)
            return false;
        auto& h = host[static_cast<std::size_t>(l)];
        if (h < 0)
            h = u;
        else if (h != u)
            return false;
    }
    return true;
}

struct IsolatingSubdomain {
    RegionMask omega0;
    double eta = 0.0;
    /// Sublevel threshold 1/m of the first admissible m.
    double m = 0.0;
    double threshold = 0.0;
};

inline constexpr double kZeroTolerance = 1e-12;

/// Doubles m until the component of x0 in {V <= 1/m} avoids the domain
/// boundary and every zero not connected to x0 through zeros, then returns the
/// component of x0 in {V < 1/m}.
inline IsolatingSubdomain isolating_subdomain(const std::vector<double>& V, const GridShape& shape, std::size_t x0,
                                              const std::vector<bool>& on_domain_boundary)
{
    require(x0 < V.size(), ErrorCode::InvalidArgument, "x0 node out of range");
    if (!(std::abs(V[x0]) <= kZeroTolerance))
        throw Error(ErrorCode::NotAZero, "V(x0) = " + csv::format(V[x0]) + " is not zero");
    // Zero nodes connected to x0 through zeros; other zeros must be split off.
    const auto zeros = sublevel_components(V, shape, kZeroTolerance, on_domain_boundary);
    const int own_zero = zeros.labels[x0];
    for (int e = 0; e <= 52; ++e) {
        const double m = std::ldexp(1.0, e);
        const double tau = 1.0 / m;
        const auto closed = sublevel_components(V, shape, tau, on_domain_boundary);
        const int label = closed.labels[x0];
        if (closed.touches_boundary[static_cast<std::size_t>(label)])
            continue;
        bool foreign_zero = false;
        for (std::size_t k = 0; k < V.size() && !foreign_zero; ++k)
            foreign_zero = closed.labels[k] == label && zeros.labels[k] >= 0 && zeros.labels[k] != own_zero;
        if (foreign_zero)
            continue;
        const auto open = sublevel_components(V, shape, tau, on_domain_boundary, true);
        IsolatingSubdomain out;
        out.m = m;
        out.threshold = tau;
        out.omega0 = open.mask(open.labels[x0]);
        out.omega0.set_domain_boundary(on_domain_boundary);
        out.eta = std::numeric_limits<double>::infinity();
        for (std::size_t k : out.omega0.boundary_nodes())
            out.eta = std::min(out.eta, V[k]);
        return out;
    }
    throw Error(ErrorCode::ZeroTouchesBoundary,
                "the zero component containing node " + std::to_string(x0) + " meets the domain boundary");
}

inline IsolatingSubdomain isolating_subdomain(const std::vector<double>& V, std::size_t x0)
{
    const GridShape shape{V.size(), 1};
    return isolating_subdomain(V, shape, x0, detail::edge_flags(shape));
}

/// Uses the domain's own notion of boundary (a ball's origin is interior).
inline IsolatingSubdomain isolating_subdomain(const std::vector<double>& V, const Domain& domain, std::size_t x0)
{
    const GridShape shape{domain.size(), 1};
    std::vector<bool> flags(domain.size());
    for (std::size_t i = 0; i < flags.size(); ++i)
        flags[i] = domain.is_boundary_node(i);
    return isolating_subdomain(V, shape, x0, flags);
}

inline void write_mask(const RegionMask& mask, const std::vector<double>& xs, const std::filesystem::path& path)
{
    require(xs.size() == mask.size(), ErrorCode::InvalidArgument, "mask/coordinate size mismatch");
    csv::Writer out(path);
    out.header({"x", "mask"});
    for (std::size_t k = 0; k < mask.size(); ++k)
        out.row({xs[k], mask[k] ? 1.0 : 0.0});
    out.close();
}

} // namespace blowup
