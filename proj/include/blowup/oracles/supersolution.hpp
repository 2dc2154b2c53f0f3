#pragma once

// w(t,x) = K / [q(x) + T - t]^alpha with q(x) = beta cos^2(pi |x - x0| / 2r),
// a supersolution of u_t = Lap u + V C (1 + u)^p on B(x0, r) when
//   1 + Lap q - (alpha + 1) |grad q|^2 / q - (2C/alpha) K^(p-1) V >= 0.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <vector>

#include "blowup/csv.hpp"
#include "blowup/domain.hpp"
#include "blowup/error.hpp"
#include "blowup/solver.hpp"

namespace blowup::oracles {

struct Supersolution {
    double K = 1.0;
    double beta = 0.5;
    double r = 1.0;
    double x0 = 0.0;
    double T = 1.0;
    double alpha = 1.0;
    /// Space dimension for the radial Laplacian of q (x0 at the origin when n > 1).
    int n = 1;

    double k() const { return std::numbers::pi / (2.0 * r); }
    double q(double x) const
    {
        const double c = std::cos(k() * std::abs(x - x0));
        return beta * c * c;
    }
    double operator()(double t, double x) const { return K * std::pow(q(x) + T - t, -alpha); }

    /// Lap q at distance rho from x0.
    double lap_q(double rho) const
    {
        const double kk = k();
        const double qrr = -2.0 * beta * kk * kk * std::cos(2.0 * kk * rho);
        // q_r / rho, with its limit at rho = 0.
        const double qr_over_rho =
            rho > 0.0 ? -beta * kk * std::sin(2.0 * kk * rho) / rho : -2.0 * beta * kk * kk;
        return qrr + (n - 1) * qr_over_rho;
    }
    /// |grad q|^2 / q in the closed form 4 beta k^2 sin^2(k rho), finite at q = 0.
    double grad_q_sq_over_q(double rho) const
    {
        const double kk = k();
        const double s = std::sin(kk * rho);
        return 4.0 * beta * kk * kk * s * s;
    }
};

struct SupersolutionResidual {
    /// min over grid and sampled tau of w_t - Lap w - V C (1 + w)^p.
    double min_residual = std::numeric_limits<double>::infinity();
    /// min over grid of the sufficient condition.
    double condition_min = std::numeric_limits<double>::infinity();
};

inline std::vector<double> default_taus()
{
    std::vector<double> taus;
    for (int e = -8; e <= 0; ++e)
        taus.push_back(std::pow(10.0, e));
    return taus;
}

/// Evaluates both quantities at the given nodes (all must lie in B(x0, r)).
inline SupersolutionResidual supersolution_residual(const Supersolution& s, const std::function<double(double)>& V,
                                                    double C, double p, const std::vector<double>& grid,
                                                    const std::vector<double>& taus = default_taus())
{
    require(s.beta > 0.0 && s.beta < 1.0, ErrorCode::InvalidArgument, "beta must lie in (0, 1)");
    require(s.K > 0.0 && s.r > 0.0, ErrorCode::InvalidArgument, "K and r must be > 0");
    const double a = s.alpha;
    SupersolutionResidual out;
    for (double x : grid) {
        const double rho = std::abs(x - s.x0);
        if (rho > s.r * (1.0 + 1e-12))
            throw Error(ErrorCode::InvalidArgument, "node x = " + csv::format(x) + " lies outside B(x0, r)");
        const double Vx = V(x);
        const double lq = s.lap_q(rho);
        const double g2q = s.grad_q_sq_over_q(rho);
        out.condition_min =
            std::min(out.condition_min, 1.0 + lq - (a + 1.0) * g2q - (2.0 * C / a) * std::pow(s.K, p - 1.0) * Vx);
        const double q = s.q(x);
        const double g2 = g2q * q;
        for (double tau : taus) {
            const double z = q + tau;
            const double w = s.K * std::pow(z, -a);
            const double wt = a * s.K * std::pow(z, -a - 1.0);
            const double lap_w = s.K * (-a * std::pow(z, -a - 1.0) * lq + a * (a + 1.0) * std::pow(z, -a - 2.0) * g2);
            out.min_residual = std::min(out.min_residual, wt - lap_w - Vx * C * std::pow(1.0 + w, p));
        }
    }
    return out;
}

struct SupersolutionSearch {
    double M = 0.0;
    double rho = 0.0;
    double x0 = 0.0;
    double T = 0.0;
    double C = 1.0;
    double p = 2.0;
    std::function<double(double)> V;
    /// Optional data to dominate; snapshots with t < T only.
    const Trajectory* trajectory = nullptr;
    const Domain* domain = nullptr;
    std::size_t grid_points = 2001;
};

struct SupersolutionFit {
    Supersolution w;
    SupersolutionResidual residual;
    bool dominates = false;
    double worst_ratio = 0.0;  // max over snapshots and B(x0, r) of u / w
};

namespace detail {

/// 40-step bisection on log x in [lo, hi] for the edge of a predicate that
/// is monotone in x. `ok_at_hi` says which end is feasible.
inline double geometric_bisection(double lo, double hi, bool ok_at_hi, const std::function<bool(double)>& ok)
{
    double a = std::log(lo), b = std::log(hi);
    for (int it = 0; it < 40; ++it) {
        const double mid = 0.5 * (a + b);
        const bool good = ok(std::exp(mid));
        if (ok_at_hi)
            (good ? b : a) = mid;
        else
            (good ? a : b) = mid;
    }
    return std::exp(ok_at_hi ? b : a);
}

inline std::vector<double> ball_grid(double x0, double r, std::size_t n)
{
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i)
        g[i] = x0 - r + 2.0 * r * static_cast<double>(i) / static_cast<double>(n - 1);
    return g;
}

inline double worst_ratio(const Supersolution& w, const Trajectory& traj, const Domain& dom)
{
    double worst = 0.0;
    for (const auto& s : traj.snapshots) {
        if (!(s.t < w.T))
            continue;
        for (std::size_t i = 0; i < s.u.size(); ++i) {
            const double x = dom.coordinate(i);
            if (std::abs(x - w.x0) > w.r)
                continue;
            worst = std::max(worst, s.u[i] / w(s.t, x));
        }
    }
    return worst;
}

} // namespace detail

/// Chooses K, then r, then beta. K is the smallest value above M with
/// u <= K (T - t)^-alpha on B(x0, rho) over the data; r the largest radius in
/// (0, rho/2) with (2C/alpha) K^(p-1) V < 1/3 on B(x0, r); beta the largest
/// value in (0, 1) making the sufficient condition positive and w dominate u.
inline SupersolutionFit find_supersolution(const SupersolutionSearch& in)
{
    require(in.M > 0.0 && in.rho > 0.0 && in.p > 1.0 && in.C > 0.0, ErrorCode::InvalidArgument,
            "supersolution search needs M, rho, C > 0 and p > 1");
    require(static_cast<bool>(in.V), ErrorCode::InvalidArgument, "supersolution search needs V");
    const double alpha = 1.0 / (in.p - 1.0);
    const bool have_data = in.trajectory && in.domain;

    const auto type_one_ok = [&](double K) {
        if (!have_data)
            return K > in.M;
        for (const auto& s : in.trajectory->snapshots) {
            if (!(s.t < in.T))
                continue;
            const double bound = K * std::pow(in.T - s.t, -alpha);
            for (std::size_t i = 0; i < s.u.size(); ++i)
                if (std::abs(in.domain->coordinate(i) - in.x0) <= in.rho && s.u[i] > bound)
                    return false;
        }
        return true;
    };
    double K = in.M;
    if (!type_one_ok(K)) {
        if (!type_one_ok(1e6 * in.M))
            throw Error(ErrorCode::Infeasible, "data exceed 1e6 M (T - t)^-alpha near x0");
        K = detail::geometric_bisection(in.M, 1e6 * in.M, true, type_one_ok);
    }
    K *= 1.0 + 1e-3;

    const double coef = (2.0 * in.C / alpha) * std::pow(K, in.p - 1.0);
    const auto r_ok = [&](double r) {
        for (double x : detail::ball_grid(in.x0, r, in.grid_points))
            if (!(coef * in.V(x) < 1.0 / 3.0))
                return false;
        return true;
    };
    const double r_hi = 0.5 * in.rho * (1.0 - 1e-9);
    const double r_lo = r_hi * 1e-9;
    if (!r_ok(r_lo))
        throw Error(ErrorCode::Infeasible, "no radius keeps (2C/alpha) K^(p-1) V below 1/3 near x0");
    const double r = r_ok(r_hi) ? r_hi : detail::geometric_bisection(r_lo, r_hi, false, r_ok);

    const auto grid = detail::ball_grid(in.x0, r, in.grid_points);
    const auto beta_ok = [&](double beta) {
        Supersolution w{K, beta, r, in.x0, in.T, alpha};
        if (!(supersolution_residual(w, in.V, in.C, in.p, grid, {}).condition_min > 0.0))
            return false;
        return !have_data || detail::worst_ratio(w, *in.trajectory, *in.domain) <= 1.0;
    };
    const double b_hi = 0.99, b_lo = 1e-12;
    if (!beta_ok(b_lo))
        throw Error(ErrorCode::Infeasible, "no beta in (0, 1) satisfies the supersolution conditions");
    // Half the largest feasible beta, so the residual condition holds with margin
    // rather than at roundoff level; w only grows as beta shrinks.
    const double beta = 0.5 * (beta_ok(b_hi) ? b_hi : detail::geometric_bisection(b_lo, b_hi, false, beta_ok));

    SupersolutionFit fit;
    fit.w = Supersolution{K, beta, r, in.x0, in.T, alpha};
    fit.residual = supersolution_residual(fit.w, in.V, in.C, in.p, grid);
    if (have_data) {
        fit.worst_ratio = detail::worst_ratio(fit.w, *in.trajectory, *in.domain);
        fit.dominates = fit.worst_ratio <= 1.0;
    } else {
        fit.dominates = true;
    }
    return fit;
}

} // namespace blowup::oracles
