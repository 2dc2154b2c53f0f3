#pragma once

// Self-similar zoom v(s, y) = lambda^(2 alpha) u(t_hat + lambda^2 s, x0 + lambda y)
// with lambda = sqrt(T_hat - t_hat).

#include <algorithm>
#include <cmath>
#include <vector>

#include "blowup/domain.hpp"
#include "blowup/error.hpp"
#include "blowup/nonlinearity.hpp"
#include "blowup/solver.hpp"

namespace blowup::oracles {

struct RescaledWindow {
    double lambda = 1.0;
    double t_hat = 0.0;
    double x0 = 0.0;
    double alpha = 1.0;
    std::vector<double> s;
    std::vector<double> y;
    /// Row-major: v[i * y.size() + j] = v(s[i], y[j]).
    std::vector<double> v;

    double at(std::size_t i, std::size_t j) const { return v[i * y.size() + j]; }

    /// Bilinear interpolation on the (s, y) lattice.
    double interpolate(double ss, double yy) const
    {
        const auto locate = [](const std::vector<double>& g, double z, double& w) {
            require(z >= g.front() - 1e-12 * std::abs(g.front()) && z <= g.back() + 1e-12 * std::abs(g.back()),
                    ErrorCode::WindowOutOfSupport, "point outside the rescaled lattice");
            std::size_t k = static_cast<std::size_t>(std::upper_bound(g.begin(), g.end(), z) - g.begin());
            k = std::clamp<std::size_t>(k, 1, g.size() - 1);
            w = std::clamp((z - g[k - 1]) / (g[k] - g[k - 1]), 0.0, 1.0);
            return k - 1;
        };
        double ws = 0.0, wy = 0.0;
        const std::size_t i = locate(s, ss, ws);
        const std::size_t j = locate(y, yy, wy);
        return (1 - ws) * ((1 - wy) * at(i, j) + wy * at(i, j + 1)) +
               ws * ((1 - wy) * at(i + 1, j) + wy * at(i + 1, j + 1));
    }

    /// Inverse transform: recovers u(t, x) from the window.
    double unscale(double t, double x) const
    {
        return std::pow(lambda, -2.0 * alpha) * interpolate((t - t_hat) / (lambda * lambda), (x - x0) / lambda);
    }
};

/// u(t, x) by linear interpolation between snapshots in t and nodes in x.
inline double sample_trajectory(const Trajectory& traj, const Domain& dom, double t, double x)
{
    const auto& snaps = traj.snapshots;
    require(!snaps.empty(), ErrorCode::InsufficientData, "empty trajectory");
    if (dom.radial())
        x = std::abs(x);
    if (t < snaps.front().t || t > snaps.back().t || x < dom.lower() || x > dom.upper())
        throw Error(ErrorCode::WindowOutOfSupport, "point outside the trajectory's space-time support");
    std::size_t k = static_cast<std::size_t>(
        std::upper_bound(snaps.begin(), snaps.end(), t, [](double tt, const SolutionState& s) { return tt < s.t; }) -
        snaps.begin());
    k = std::clamp<std::size_t>(k, 1, snaps.size() - 1);
    const double wt = snaps[k].t > snaps[k - 1].t
                          ? std::clamp((t - snaps[k - 1].t) / (snaps[k].t - snaps[k - 1].t), 0.0, 1.0)
                          : 0.0;
    const double pos = (x - dom.lower()) / dom.spacing();
    const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(std::max(pos, 0.0)), dom.size() - 2);
    const double xi = dom.coordinate(i), xj = dom.coordinate(i + 1);
    const double wx = std::clamp((x - xi) / (xj - xi), 0.0, 1.0);
    const auto row = [&](const SolutionState& s) { return (1 - wx) * s.u[i] + wx * s.u[i + 1]; };
    return (1 - wt) * row(snaps[k - 1]) + wt * row(snaps[k]);
}

/// Samples v on an (ns x ny) lattice over s in [s_lo, s_hi], |y| <= y_max.
inline RescaledWindow rescale_window(const Trajectory& traj, const Domain& dom, double T_hat, double alpha,
                                     double t_hat, double x0, double s_lo, double s_hi, double y_max,
                                     std::size_t ns = 33, std::size_t ny = 65)
{
    require(t_hat < T_hat, ErrorCode::InvalidArgument, "t_hat must precede T_hat");
    require(s_lo < s_hi && s_hi < 1.0 && y_max > 0.0 && ns >= 2 && ny >= 2, ErrorCode::InvalidArgument,
            "rescale window needs s_lo < s_hi < 1, y_max > 0 and at least 2x2 samples");
    RescaledWindow w;
    w.lambda = std::sqrt(T_hat - t_hat);
    w.t_hat = t_hat;
    w.x0 = x0;
    w.alpha = alpha;
    const double scale = std::pow(w.lambda, 2.0 * alpha);
    for (std::size_t i = 0; i < ns; ++i)
        w.s.push_back(s_lo + (s_hi - s_lo) * static_cast<double>(i) / static_cast<double>(ns - 1));
    for (std::size_t j = 0; j < ny; ++j)
        w.y.push_back(-y_max + 2.0 * y_max * static_cast<double>(j) / static_cast<double>(ny - 1));
    w.v.reserve(ns * ny);
    for (double ss : w.s)
        for (double yy : w.y)
            w.v.push_back(scale * sample_trajectory(traj, dom, t_hat + w.lambda * w.lambda * ss, x0 + w.lambda * yy));
    return w;
}

/// lambda^(2p/(p-1)) f(lambda^(-2/(p-1)) v); exactly v^p for Power.
inline double rescaled_nonlinearity(const Nonlinearity& f, double lambda, double v)
{
    require(lambda > 0.0 && v >= 0.0, ErrorCode::InvalidArgument, "rescaled nonlinearity needs lambda > 0, v >= 0");
    const double p = f.exponent();
    if (f.kind() == Nonlinearity::Kind::Power)
        return f(v);
    return std::pow(lambda, 2.0 * p / (p - 1.0)) * f(std::pow(lambda, -2.0 / (p - 1.0)) * v);
}

} // namespace blowup::oracles
