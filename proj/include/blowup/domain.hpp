#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "blowup/error.hpp"

namespace blowup {

struct Interval {
    double a;
    double b;
};

struct RadialBall {
    int n;
    double R;
};

struct RadialAnnulus {
    int n;
    double r1;
    double r2;
};

using Geometry = std::variant<Interval, RadialBall, RadialAnnulus>;

enum class Boundary { DirichletZero, Neumann };

inline const char* to_string(Boundary b) { return b == Boundary::DirichletZero ? "dirichlet" : "neumann"; }

/// Uniform grid on a 1D interval or on the radial coordinate of a ball or
/// annulus. Node 0 is the left end (or the origin for a ball).
class Domain {
public:
    Domain(Geometry geometry, std::size_t grid_points, Boundary boundary)
        : geometry_(geometry), points_(grid_points), boundary_(boundary)
    {
        require(grid_points >= 16, ErrorCode::InvalidArgument, "grid_points must be >= 16");
        std::visit(
            [](const auto& g) {
                using G = std::decay_t<decltype(g)>;
                if constexpr (std::is_same_v<G, Interval>) {
                    require(g.a < g.b, ErrorCode::InvalidArgument, "interval needs a < b");
                } else if constexpr (std::is_same_v<G, RadialBall>) {
                    require(g.n >= 1, ErrorCode::InvalidArgument, "ball dimension must be >= 1");
                    require(g.R > 0, ErrorCode::InvalidArgument, "ball radius must be > 0");
                } else {
                    require(g.n >= 1, ErrorCode::InvalidArgument, "annulus dimension must be >= 1");
                    require(g.r1 > 0, ErrorCode::InvalidArgument, "annulus inner radius must be > 0");
                    require(g.r1 < g.r2, ErrorCode::InvalidArgument, "annulus needs r1 < r2");
                }
            },
            geometry_);
        switch (geometry_.index()) {
        case 0: lo_ = std::get<Interval>(geometry_).a; hi_ = std::get<Interval>(geometry_).b; break;
        case 1: lo_ = 0.0; hi_ = std::get<RadialBall>(geometry_).R; break;
        default: lo_ = std::get<RadialAnnulus>(geometry_).r1; hi_ = std::get<RadialAnnulus>(geometry_).r2;
        }
        dx_ = (hi_ - lo_) / static_cast<double>(points_ - 1);
        mirrored_ = geometry_.index() == 0 && lo_ == -hi_;
    }

    static Domain interval(double a, double b, std::size_t n, Boundary bc) { return {Interval{a, b}, n, bc}; }
    static Domain ball(int dim, double R, std::size_t n, Boundary bc) { return {RadialBall{dim, R}, n, bc}; }
    static Domain annulus(int dim, double r1, double r2, std::size_t n, Boundary bc)
    {
        return {RadialAnnulus{dim, r1, r2}, n, bc};
    }

    const Geometry& geometry() const noexcept { return geometry_; }
    std::size_t size() const noexcept { return points_; }
    Boundary boundary() const noexcept { return boundary_; }
    double spacing() const noexcept { return dx_; }
    double lower() const noexcept { return lo_; }
    double upper() const noexcept { return hi_; }

    bool radial() const noexcept { return geometry_.index() != 0; }
    bool has_origin() const noexcept { return geometry_.index() == 1; }

    /// Space dimension n; 1 for an interval.
    int dimension() const noexcept
    {
        switch (geometry_.index()) {
        case 0: return 1;
        case 1: return std::get<RadialBall>(geometry_).n;
        default: return std::get<RadialAnnulus>(geometry_).n;
        }
    }

    /// Divisor of dx^2/2 in the diffusive stability limit.
    double dim_factor() const noexcept { return radial() ? static_cast<double>(dimension()) : 1.0; }

    double coordinate(std::size_t i) const noexcept
    {
        if (i + 1 == points_)
            return hi_;
        // Mirror the upper half of a symmetric interval so that x[i] == -x[N-1-i]
        // exactly and even data stays exactly even.
        if (mirrored_ && 2 * i >= points_)
            return -(lo_ + dx_ * static_cast<double>(points_ - 1 - i));
        return lo_ + dx_ * static_cast<double>(i);
    }

    std::vector<double> coordinates() const
    {
        std::vector<double> x(points_);
        for (std::size_t i = 0; i < points_; ++i)
            x[i] = coordinate(i);
        return x;
    }

    /// Nodes lying on the boundary of the physical domain. The origin of a
    /// ball is a symmetry point, not a boundary.
    bool is_boundary_node(std::size_t i) const noexcept
    {
        if (i + 1 == points_)
            return true;
        return i == 0 && !has_origin();
    }

    bool symmetric_about_zero() const noexcept
    {
        if (geometry_.index() != 0)
            return false;
        const auto& g = std::get<Interval>(geometry_);
        return std::abs(g.a + g.b) <= 1e-12 * (g.b - g.a);
    }

    std::size_t nearest_node(double x) const noexcept
    {
        const double s = std::round((x - lo_) / dx_);
        if (s <= 0)
            return 0;
        if (s >= static_cast<double>(points_ - 1))
            return points_ - 1;
        return static_cast<std::size_t>(s);
    }

    std::string describe() const
    {
        std::string geo;
        switch (geometry_.index()) {
        case 0: geo = "interval(" + std::to_string(lo_) + "," + std::to_string(hi_) + ")"; break;
        case 1: geo = "ball(n=" + std::to_string(dimension()) + ",R=" + std::to_string(hi_) + ")"; break;
        default:
            geo = "annulus(n=" + std::to_string(dimension()) + "," + std::to_string(lo_) + "," + std::to_string(hi_) + ")";
        }
        return geo + ",N=" + std::to_string(points_) + "," + to_string(boundary_);
    }

private:
    Geometry geometry_;
    std::size_t points_;
    Boundary boundary_;
    double lo_ = 0.0;
    double hi_ = 1.0;
    double dx_ = 0.0;
    bool mirrored_ = false;
};

} // namespace blowup
