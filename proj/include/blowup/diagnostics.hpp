#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "blowup/error.hpp"
#include "blowup/problem.hpp"
#include "blowup/regression.hpp"
#include "blowup/solver.hpp"
#include "blowup/zeroset.hpp"

namespace blowup {

// ---------------------------------------------------------------------------
// Type-I rate

struct RateFit {
    double exponent_hat = 0.0;
    double amplitude_hat = 0.0;
    double r_squared = 0.0;
    double t_lo = 0.0;
    double t_hi = 0.0;
    std::size_t points = 0;

    bool type_one() const noexcept { return r_squared >= 0.99; }
};

struct RateFitOptions {
    double u_lo = 1e3;
    double u_hi = 1e10;
    /// Fraction of the log(T_hat - t) range dropped at the small end.
    double exclude_fraction = 0.02;
    std::size_t min_points = 20;
};

namespace detail {

/// Indices i (with tau_i = T - t_i > 0) whose log tau lies above the bottom
/// `fraction` of the log tau range spanned by `candidates`.
inline std::vector<std::size_t> drop_terminal_fraction(const std::vector<std::size_t>& candidates,
                                                       const std::vector<double>& times, double T, double fraction)
{
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i : candidates) {
        const double l = std::log(T - times[i]);
        lo = std::min(lo, l);
        hi = std::max(hi, l);
    }
    const double cut = lo + fraction * (hi - lo);
    std::vector<std::size_t> kept;
    for (std::size_t i : candidates)
        if (std::log(T - times[i]) >= cut)
            kept.push_back(i);
    return kept;
}

} // namespace detail

/// Regression of log(max u) on log(T_hat - t) over max u in [u_lo, u_hi].
inline RateFit fit_type_one_rate(const std::vector<double>& times, const std::vector<double>& maxes, double T_hat,
                                 const RateFitOptions& opt = {})
{
    require(times.size() == maxes.size(), ErrorCode::InvalidArgument, "series size mismatch");
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < times.size(); ++i)
        if (maxes[i] >= opt.u_lo && maxes[i] <= opt.u_hi && times[i] < T_hat)
            idx.push_back(i);
    if (idx.size() < 2)
        throw Error(ErrorCode::InsufficientData, "fewer than two snapshots in the rate window");
    idx = detail::drop_terminal_fraction(idx, times, T_hat, opt.exclude_fraction);
    if (idx.size() < opt.min_points)
        throw Error(ErrorCode::InsufficientData, "only " + std::to_string(idx.size()) +
                                                     " snapshots in the rate window, need " +
                                                     std::to_string(opt.min_points));
    std::vector<double> x, y;
    for (std::size_t i : idx) {
        x.push_back(std::log(T_hat - times[i]));
        y.push_back(std::log(maxes[i]));
    }
    const LinearFit fit = fit_line(x, y);
    RateFit out;
    out.exponent_hat = -fit.slope;
    out.amplitude_hat = std::exp(fit.intercept);
    out.r_squared = fit.r_squared;
    out.t_lo = times[idx.front()];
    out.t_hi = times[idx.back()];
    out.points = idx.size();
    return out;
}

inline RateFit fit_type_one_rate(const Trajectory& traj, double T_hat, const RateFitOptions& opt = {})
{
    require(traj.status == TerminalStatus::BlowupDetected, ErrorCode::InsufficientData,
            "rate fit needs a trajectory that blew up");
    return fit_type_one_rate(traj.times(), traj.max_series(), T_hat, opt);
}

// ---------------------------------------------------------------------------
// ODE deviation |u_t - V f(u)| / (u^p + K_floor)

struct DeviationSeries {
    std::vector<double> times;
    std::vector<double> max_u;
    std::vector<double> ratio;
    std::vector<double> running_max;
    double K_floor = 1e6;
    double u_threshold = 0.0;
};

inline DeviationSeries ode_deviation(const Trajectory& traj, const ProblemSpec& spec, const RegionMask& mask,
                                     double u_threshold, double K_floor = 1e6)
{
    const auto& dom = spec.domain();
    const auto& V = spec.potential_samples();
    const auto& f = spec.nonlinearity();
    require(f.power_like(), ErrorCode::InvalidArgument, "ODE deviation needs a power-like nonlinearity");
    require(mask.size() == dom.size(), ErrorCode::InvalidArgument, "mask does not match grid");
    require(mask.any(), ErrorCode::InvalidArgument, "empty mask");
    const std::size_t N = dom.size();
    for (std::size_t i : mask.indices()) {
        const bool near_left = !dom.has_origin() && i < 3;
        if (near_left || i + 3 >= N)
            throw Error(ErrorCode::MaskTouchesBoundary, "mask node " + std::to_string(i) +
                                                            " is within 3 nodes of the boundary");
    }
    // V must stay positive on the mask dilated by one node.
    for (std::size_t i : mask.indices())
        for (std::size_t k = (i == 0 ? 0 : i - 1); k <= std::min(i + 1, N - 1); ++k)
            if (!(V[k] > 0.0))
                throw Error(ErrorCode::MaskWhereVVanishes, "V(" + csv::format(dom.coordinate(k)) + ") = " +
                                                               csv::format(V[k]));
    const double p = f.exponent();
    DeviationSeries out;
    out.K_floor = K_floor;
    out.u_threshold = u_threshold;
    std::vector<double> lap;
    double running = 0.0;
    const auto nodes = mask.indices();
    for (const auto& s : traj.snapshots) {
        laplacian_apply(s.u, dom, lap);
        double sup = -1.0;
        for (std::size_t i : nodes) {
            if (s.u[i] < u_threshold)
                continue;
            // u_t - V f(u) reduces to the diffusion term of the discrete RHS.
            sup = std::max(sup, std::abs(lap[i]) / (std::pow(s.u[i], p) + K_floor));
        }
        if (sup < 0.0)
            continue;
        running = std::max(running, sup);
        out.times.push_back(s.t);
        out.max_u.push_back(s.max_u());
        out.ratio.push_back(sup);
        out.running_max.push_back(running);
    }
    return out;
}

/// Mask of nodes with |x| <= fraction * half-width around the interval centre.
inline RegionMask central_mask(const Domain& dom, double fraction)
{
    RegionMask m = RegionMask::empty(GridShape{dom.size(), 1});
    const double c = 0.5 * (dom.lower() + dom.upper());
    const double half = 0.5 * (dom.upper() - dom.lower());
    for (std::size_t i = 0; i < dom.size(); ++i)
        if (std::abs(dom.coordinate(i) - c) <= fraction * half)
            m.set(i, true);
    return m;
}

// ---------------------------------------------------------------------------
// J = u_t - eps f(u)

struct JField {
    std::vector<double> J;
    double min_J = std::numeric_limits<double>::infinity();
};

/// J over the grid; min taken over interior nodes, or over `mask` if given.
inline JField friedman_mcleod_J(const SolutionState& state, const ProblemSpec& spec, double epsilon,
                                const RegionMask* mask = nullptr)
{
    require(epsilon > 0.0, ErrorCode::InvalidArgument, "epsilon must be > 0");
    const auto& dom = spec.domain();
    const auto& f = spec.nonlinearity();
    JField out;
    rhs(state.u, spec, out.J);
    for (std::size_t i = 0; i < out.J.size(); ++i) {
        out.J[i] -= epsilon * f(state.u[i]);
        const bool counted = mask ? (*mask)[i] : !dom.is_boundary_node(i);
        if (counted)
            out.min_J = std::min(out.min_J, out.J[i]);
    }
    return out;
}

struct MonotoneCertificate {
    double epsilon = 0.0;
    /// Earliest snapshot time from which min J >= 0 at every later snapshot.
    double t1 = std::numeric_limits<double>::quiet_NaN();
    bool holds = false;
    std::vector<double> times;
    std::vector<double> min_J;
};

inline MonotoneCertificate j_certificate(const Trajectory& traj, const ProblemSpec& spec, double epsilon,
                                         const RegionMask* mask = nullptr)
{
    MonotoneCertificate cert;
    cert.epsilon = epsilon;
    for (const auto& s : traj.snapshots) {
        cert.times.push_back(s.t);
        cert.min_J.push_back(friedman_mcleod_J(s, spec, epsilon, mask).min_J);
    }
    std::size_t k = cert.min_J.size();
    while (k > 0 && cert.min_J[k - 1] >= 0.0)
        --k;
    if (k < cert.min_J.size()) {
        cert.holds = true;
        cert.t1 = cert.times[k];
    }
    return cert;
}

// ---------------------------------------------------------------------------
// Kaplan functional

inline double kaplan_functional(const std::vector<double>& u, const Domain& dom, double ell)
{
    require(!dom.radial(), ErrorCode::InvalidArgument, "Kaplan functional needs an interval");
    require(ell > 0.0, ErrorCode::InvalidArgument, "ell must be > 0");
    require(-ell >= dom.lower() - 1e-12 && ell <= dom.upper() + 1e-12, ErrorCode::InvalidArgument,
            "ell exceeds the domain half-width");
    const double k = std::numbers::pi / (2.0 * ell);
    const auto xs = dom.coordinates();
    const auto interp = [&](double x) {
        const std::size_t j = std::min<std::size_t>(
            static_cast<std::size_t>(std::max(0.0, std::floor((x - dom.lower()) / dom.spacing()))), xs.size() - 2);
        const double w = (x - xs[j]) / (xs[j + 1] - xs[j]);
        return u[j] + w * (u[j + 1] - u[j]);
    };
    // Trapezoid over the nodes inside [-ell, ell] plus the two partial end cells.
    std::vector<double> px{-ell}, pv{interp(-ell) * std::cos(-k * ell)};
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (xs[i] > -ell && xs[i] < ell) {
            px.push_back(xs[i]);
            pv.push_back(u[i] * std::cos(k * xs[i]));
        }
    px.push_back(ell);
    pv.push_back(interp(ell) * std::cos(k * ell));
    double sum = 0.0;
    for (std::size_t i = 1; i < px.size(); ++i)
        sum += 0.5 * (pv[i] + pv[i - 1]) * (px[i] - px[i - 1]);
    return sum;
}

// ---------------------------------------------------------------------------
// Reflection symmetry and monotonicity on [0, L]

struct SymmetryCheck {
    double even_defect = 0.0;
    double ux_max = -std::numeric_limits<double>::infinity();
    bool max_at_origin = false;
    /// False when L < 1/3, outside the range where the property is proven.
    bool proven_regime = true;
};

inline SymmetryCheck symmetry_monotonicity_check(const std::vector<double>& u, const Domain& dom, double L)
{
    require(dom.symmetric_about_zero(), ErrorCode::InvalidArgument, "symmetry check needs an interval (-l, l)");
    require(L > 0.0 && L < dom.upper(), ErrorCode::InvalidArgument, "L must lie in (0, half-width)");
    const std::size_t N = dom.size();
    SymmetryCheck out;
    out.proven_regime = L >= 1.0 / 3.0;
    for (std::size_t i = 0; i < N; ++i)
        out.even_defect = std::max(out.even_defect, std::abs(u[i] - u[N - 1 - i]));
    const double two_h = 2.0 * dom.spacing();
    for (std::size_t i = 1; i + 1 < N; ++i) {
        const double x = dom.coordinate(i);
        if (x >= 0.0 && x <= L)
            out.ux_max = std::max(out.ux_max, (u[i + 1] - u[i - 1]) / two_h);
    }
    const auto arg = static_cast<std::size_t>(std::max_element(u.begin(), u.end()) - u.begin());
    const std::size_t centre = dom.nearest_node(0.0);
    out.max_at_origin = (arg > centre ? arg - centre : centre - arg) <= 1;
    return out;
}

// ---------------------------------------------------------------------------
// Nondegeneracy: liminf (T - t)^alpha u(t, x0) >= kappa A^-alpha

struct NondegeneracyResult {
    double liminf_hat = 0.0;
    double threshold = 0.0;
    bool satisfied = false;
    double t_lo = 0.0;
    double t_hi = 0.0;
    std::size_t points = 0;
};

/// Min of (T_hat - t)^alpha u(t, x0) over the final decade of T_hat - t.
/// Gaps below 1e4 ulp(T_hat) are roundoff (t stops advancing once dt drops
/// under ulp(t)), so the decade starts at the smallest gap above that floor.
/// `tolerance` is the relative slack allowed below the threshold.
inline NondegeneracyResult nondegeneracy_check(const Trajectory& traj, std::size_t x0, double A, double alpha,
                                               double kappa, double T_hat, double tolerance = 0.0)
{
    const auto& last = traj.last();
    require(x0 < last.u.size(), ErrorCode::InvalidArgument, "x0 node out of range");
    const double top = last.max_u();
    if (traj.status != TerminalStatus::BlowupDetected || !(last.u[x0] >= std::sqrt(top)))
        throw Error(ErrorCode::NotABlowupPoint, "node " + std::to_string(x0) + " ends at u = " +
                                                    csv::format(last.u[x0]) + " against max " + csv::format(top));
    NondegeneracyResult out;
    out.threshold = kappa * std::pow(A, -alpha);
    const double tau_floor = 1e4 * std::numeric_limits<double>::epsilon() * std::abs(T_hat);
    double tau_min = std::numeric_limits<double>::infinity();
    for (const auto& s : traj.snapshots)
        if (T_hat - s.t >= tau_floor)
            tau_min = std::min(tau_min, T_hat - s.t);
    require(std::isfinite(tau_min), ErrorCode::InsufficientData, "no snapshot resolvably before T_hat");
    out.liminf_hat = std::numeric_limits<double>::infinity();
    for (const auto& s : traj.snapshots) {
        const double tau = T_hat - s.t;
        if (tau < tau_min || tau > 10.0 * tau_min)
            continue;
        out.liminf_hat = std::min(out.liminf_hat, std::pow(tau, alpha) * s.u[x0]);
        if (out.points++ == 0)
            out.t_lo = s.t;
        out.t_hi = s.t;
    }
    out.satisfied = out.liminf_hat >= (1.0 - tolerance) * out.threshold;
    return out;
}

// ---------------------------------------------------------------------------
// Weak nonlinearity: log log u(t, 0) against -log(T - t)

struct WeakRateFit {
    double slope_hat = 0.0;
    double predicted = 0.0;
    double r_squared = 0.0;
    double C1 = 0.0;
    double C2 = 0.0;
    bool sandwich_holds = false;
    double t_lo = 0.0;
    double t_hi = 0.0;
    std::size_t points = 0;
};

struct WeakRateOptions {
    double u_lo = 1e12;
    double exclude_fraction = 0.02;
    std::size_t min_points = 20;
};

/// Regression on a centre series alone (synthetic data).
inline WeakRateFit weak_rate_fit(const std::vector<double>& times, const std::vector<double>& centre, double T_hat,
                                 double a, const WeakRateOptions& opt = {})
{
    require(a > 1.0, ErrorCode::InvalidArgument, "a must be > 1");
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < times.size(); ++i)
        if (centre[i] >= opt.u_lo && centre[i] > std::numbers::e && times[i] < T_hat)
            idx.push_back(i);
    if (idx.size() < 2)
        throw Error(ErrorCode::InsufficientData, "fewer than two snapshots in the weak-rate window");
    idx = detail::drop_terminal_fraction(idx, times, T_hat, opt.exclude_fraction);
    if (idx.size() < opt.min_points)
        throw Error(ErrorCode::InsufficientData, "only " + std::to_string(idx.size()) +
                                                     " snapshots in the weak-rate window");
    std::vector<double> x, y;
    WeakRateFit out;
    out.predicted = 1.0 / (a - 1.0);
    const double k = out.predicted;
    for (std::size_t i : idx) {
        const double tau = T_hat - times[i];
        x.push_back(-std::log(tau));
        y.push_back(std::log(std::log(centre[i])));
        out.C2 = std::max(out.C2, std::log(centre[i]) * std::pow(tau, k));
    }
    const LinearFit fit = fit_line(x, y);
    out.slope_hat = fit.slope;
    out.r_squared = fit.r_squared;
    out.t_lo = times[idx.front()];
    out.t_hi = times[idx.back()];
    out.points = idx.size();
    return out;
}

namespace detail {

/// Largest C with log C + log d + C s <= log_u (left side increasing in C).
inline double largest_lower_constant(double log_u, double log_d, double s)
{
    double lo = -745.0;
    double hi = std::log(std::max(log_u / s, 1e-300)) + 1.0;
    const auto g = [&](double logC) { return logC + log_d + std::exp(logC) * s - log_u; };
    if (g(lo) > 0.0)
        return 0.0;
    while (g(hi) <= 0.0)
        hi += 1.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) <= 0.0 ? lo : hi) = mid;
    }
    return std::exp(lo);
}

} // namespace detail

/// Full fit on a trajectory: slope from the centre series, C2 from the centre
/// upper bound, C1 from the spatial lower bound d(x) exp[C1 (T-t)^-k] where
/// d(x) is the distance to the boundary, and the middle inequality u <= u(t,0).
inline WeakRateFit weak_rate_fit(const Trajectory& traj, const Domain& dom, double T_hat, double a,
                                 const WeakRateOptions& opt = {})
{
    require(traj.status == TerminalStatus::BlowupDetected, ErrorCode::InsufficientData,
            "weak-rate fit needs a trajectory that blew up");
    require(!dom.radial(), ErrorCode::InvalidArgument, "weak-rate fit needs an interval");
    const std::size_t c = dom.nearest_node(0.5 * (dom.lower() + dom.upper()));
    std::vector<double> times, centre;
    for (const auto& s : traj.snapshots) {
        times.push_back(s.t);
        centre.push_back(s.u[c]);
    }
    WeakRateFit out = weak_rate_fit(times, centre, T_hat, a, opt);
    const double k = out.predicted;
    bool middle = true;
    double C1 = std::numeric_limits<double>::infinity();
    for (const auto& s : traj.snapshots) {
        if (s.t < out.t_lo || s.t > out.t_hi)
            continue;
        const double tau_pow = std::pow(T_hat - s.t, -k);
        for (std::size_t i = 0; i < s.u.size(); ++i) {
            if (dom.is_boundary_node(i))
                continue;
            const double x = dom.coordinate(i);
            const double d = std::min(x - dom.lower(), dom.upper() - x);
            if (!(s.u[i] > 0.0))
                C1 = 0.0;
            else
                C1 = std::min(C1, detail::largest_lower_constant(std::log(s.u[i]), std::log(d), tau_pow));
            if (s.u[i] > s.u[c] * (1.0 + 1e-12))
                middle = false;
        }
    }
    out.C1 = std::isfinite(C1) ? C1 : 0.0;
    out.sandwich_holds = out.C1 > 0.0 && out.C1 <= out.C2 && middle;
    return out;
}

// ---------------------------------------------------------------------------
// Time monotonicity and dt summability

/// u(t_{k+1}) >= u(t_k) - slack * max u at every node for consecutive snapshots.
inline bool monotone_in_time(const Trajectory& traj, double slack = 1e-10)
{
    for (std::size_t k = 1; k < traj.snapshots.size(); ++k) {
        const auto& a = traj.snapshots[k - 1].u;
        const auto& b = traj.snapshots[k].u;
        const double tol = slack * std::max(traj.snapshots[k].max_u(), 1.0);
        for (std::size_t i = 0; i < a.size(); ++i)
            if (b[i] < a[i] - tol)
                return false;
    }
    return true;
}

} // namespace blowup
