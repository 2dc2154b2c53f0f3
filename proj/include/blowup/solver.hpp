#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "blowup/error.hpp"
#include "blowup/laplacian.hpp"
#include "blowup/problem.hpp"
#include "blowup/regression.hpp"

namespace blowup {

struct SolutionState {
    double t = 0.0;
    std::vector<double> u;
    double dt_last = 0.0;
    std::size_t step_count = 0;

    double max_u() const { return u.empty() ? 0.0 : *std::max_element(u.begin(), u.end()); }
    std::size_t argmax() const
    {
        return static_cast<std::size_t>(std::max_element(u.begin(), u.end()) - u.begin());
    }
};

enum class TerminalStatus { Running, BlowupDetected, TimeHorizonReached, Steady };

inline const char* to_string(TerminalStatus s)
{
    switch (s) {
    case TerminalStatus::Running: return "Running";
    case TerminalStatus::BlowupDetected: return "BlowupDetected";
    case TerminalStatus::TimeHorizonReached: return "TimeHorizonReached";
    case TerminalStatus::Steady: return "Steady";
    }
    return "?";
}

inline TerminalStatus terminal_status_from_string(const std::string& s)
{
    for (auto v : {TerminalStatus::Running, TerminalStatus::BlowupDetected, TerminalStatus::TimeHorizonReached,
                   TerminalStatus::Steady})
        if (s == to_string(v))
            return v;
    throw Error(ErrorCode::Parse, "unknown terminal status '" + s + "'");
}

struct Trajectory {
    std::vector<SolutionState> snapshots;
    std::vector<std::string> events;
    TerminalStatus status = TerminalStatus::Running;

    const SolutionState& last() const
    {
        require(!snapshots.empty(), ErrorCode::InsufficientData, "empty trajectory");
        return snapshots.back();
    }

    std::vector<double> times() const
    {
        std::vector<double> out;
        out.reserve(snapshots.size());
        for (const auto& s : snapshots)
            out.push_back(s.t);
        return out;
    }

    std::vector<double> max_series() const
    {
        std::vector<double> out;
        out.reserve(snapshots.size());
        for (const auto& s : snapshots)
            out.push_back(s.max_u());
        return out;
    }

    /// Snapshots 0..id inclusive, for resuming from a mid-run frame.
    Trajectory prefix(std::size_t id) const
    {
        require(id < snapshots.size(), ErrorCode::InvalidArgument, "snapshot id out of range");
        Trajectory t;
        t.snapshots.assign(snapshots.begin(), snapshots.begin() + static_cast<std::ptrdiff_t>(id + 1));
        t.status = TerminalStatus::Running;
        return t;
    }
};

struct SolverOptions {
    double u_blow = 1e12;
    double dt_min = 1e-30;
    double safety = 0.4;
    double horizon = 1e3;
    /// Geometric snapshot density in max u.
    int snapshots_per_decade = 32;
    /// Time-based snapshots (also drive steady detection); 0 means horizon / 256.
    double snapshot_interval = 0.0;
    std::size_t max_snapshots = 1000000;
    std::size_t max_steps = 100000000;
    double steady_tol = 1e-12;

    double effective_interval() const
    {
        if (snapshot_interval > 0.0)
            return snapshot_interval;
        return std::isfinite(horizon) ? horizon / 256.0 : std::numeric_limits<double>::infinity();
    }
};

// ---------------------------------------------------------------------------
// Semi-discrete right-hand side and one RK2 step

inline void rhs(const std::vector<double>& u, const ProblemSpec& spec, std::vector<double>& out)
{
    const auto& dom = spec.domain();
    const auto& V = spec.potential_samples();
    const auto& f = spec.nonlinearity();
    laplacian_apply(u, dom, out);
    const bool dirichlet = dom.boundary() == Boundary::DirichletZero;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (dirichlet && dom.is_boundary_node(i)) {
            out[i] = 0.0;
            continue;
        }
        if (V[i] != 0.0)
            out[i] += V[i] * f.eval(u[i]).f;
    }
}

inline std::vector<double> rhs(const std::vector<double>& u, const ProblemSpec& spec)
{
    std::vector<double> out;
    rhs(u, spec, out);
    return out;
}

namespace detail {

inline void impose_and_check(std::vector<double>& u, const Domain& dom)
{
    const bool dirichlet = dom.boundary() == Boundary::DirichletZero;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (dirichlet && dom.is_boundary_node(i)) {
            u[i] = 0.0;
            continue;
        }
        if (!std::isfinite(u[i]))
            throw StepError(ErrorCode::StepOverflow, i, "non-finite value");
        if (u[i] < 0.0) {
            if (u[i] < -kNegativeSlack)
                throw StepError(ErrorCode::NegativeState, i, "negative value " + std::to_string(u[i]));
            u[i] = 0.0;
        }
    }
}

} // namespace detail

/// Boundary conditions imposed on raw initial data.
inline SolutionState initial_state(const ProblemSpec& spec)
{
    SolutionState s;
    s.u = spec.initial_data();
    detail::impose_and_check(s.u, spec.domain());
    return s;
}

/// One explicit midpoint (RK2) step.
inline SolutionState advance(const SolutionState& state, const ProblemSpec& spec, double dt)
{
    require(dt > 0.0, ErrorCode::InvalidArgument, "advance needs dt > 0");
    const auto& dom = spec.domain();
    const std::size_t N = state.u.size();
    std::vector<double> k(N);
    rhs(state.u, spec, k);
    std::vector<double> mid(N);
    for (std::size_t i = 0; i < N; ++i)
        mid[i] = state.u[i] + 0.5 * dt * k[i];
    detail::impose_and_check(mid, dom);
    rhs(mid, spec, k);
    SolutionState next;
    next.u.resize(N);
    for (std::size_t i = 0; i < N; ++i)
        next.u[i] = state.u[i] + dt * k[i];
    detail::impose_and_check(next.u, dom);
    next.t = state.t + dt;
    next.dt_last = dt;
    next.step_count = state.step_count + 1;
    return next;
}

inline double adaptive_dt(const SolutionState& state, const ProblemSpec& spec, double safety = 0.4)
{
    const auto& dom = spec.domain();
    const auto& V = spec.potential_samples();
    const auto& f = spec.nonlinearity();
    const double h = dom.spacing();
    const double diffusive = h * h / (2.0 * dom.dim_factor());
    double rate = 0.0;
    for (std::size_t i = 0; i < state.u.size(); ++i)
        if (V[i] != 0.0)
            rate = std::max(rate, V[i] * f.eval(state.u[i]).df);
    const double reaction = 1.0 / std::max(rate, 1e-30);
    return safety * std::min(diffusive, reaction);
}

// ---------------------------------------------------------------------------
// Blowup time estimation

struct BlowupTimeEstimate {
    double T_hat = std::numeric_limits<double>::infinity();
    double uncertainty = std::numeric_limits<double>::quiet_NaN();
    double r_squared = 0.0;
    bool fit_degenerate = false;
    double window_t_lo = 0.0;
    double window_t_hi = 0.0;
    std::size_t points = 0;
};

inline constexpr std::size_t kMinTerminalSnapshots = 20;

/// Fits clock(max u) linearly in t over the terminal growth window and
/// returns its root. The window starts as the last decade of max u and is
/// widened by decades until it holds at least 20 snapshots.
inline BlowupTimeEstimate estimate_blowup_time(const std::vector<double>& times, const std::vector<double>& maxes,
                                               double dt_last, const std::function<double(double)>& clock)
{
    require(times.size() == maxes.size(), ErrorCode::InvalidArgument, "series size mismatch");
    require(!times.empty(), ErrorCode::InsufficientData, "empty series");
    const std::size_t n = times.size();
    std::size_t tail = n - 1;
    while (tail > 0 && maxes[tail - 1] <= maxes[tail] && maxes[tail - 1] > 0.0)
        --tail;
    if (n - tail < kMinTerminalSnapshots)
        throw Error(ErrorCode::InsufficientData, "only " + std::to_string(n - tail) +
                                                     " snapshots in the terminal growth phase");
    const double top = maxes.back();
    std::size_t start = n;
    for (double floor_value = top / 10.0;; floor_value /= 10.0) {
        start = n;
        while (start > tail && maxes[start - 1] >= floor_value)
            --start;
        if (n - start >= kMinTerminalSnapshots || start == tail)
            break;
    }

    const double t_last = times.back();
    std::vector<double> x, y;
    for (std::size_t i = start; i < n; ++i) {
        x.push_back(times[i] - t_last);
        y.push_back(clock(maxes[i]));
    }
    BlowupTimeEstimate est;
    est.points = x.size();
    est.window_t_lo = times[start];
    est.window_t_hi = t_last;
    const LinearFit fit = fit_line(x, y);
    est.r_squared = fit.r_squared;
    const auto [root, se] = fit.root();
    if (fit.r_squared < 0.99 || !(fit.slope < 0.0) || !std::isfinite(root)) {
        est.fit_degenerate = true;
        est.T_hat = t_last + dt_last;
        est.uncertainty = dt_last;
        return est;
    }
    est.T_hat = std::max(t_last + root, t_last);
    est.uncertainty = 2.0 * se;
    return est;
}

/// Type-I ansatz: (max u)^(-1/alpha) is affine in t.
inline BlowupTimeEstimate estimate_blowup_time(const Trajectory& traj, double alpha)
{
    require(alpha > 0.0, ErrorCode::InvalidArgument, "alpha must be > 0");
    return estimate_blowup_time(traj.times(), traj.max_series(), traj.last().dt_last,
                                [alpha](double m) { return std::pow(m, -1.0 / alpha); });
}

/// Uses the flat-ODE clock of the given nonlinearity (u^(-1/alpha) for Power).
inline BlowupTimeEstimate estimate_blowup_time(const Trajectory& traj, const Nonlinearity& f)
{
    return estimate_blowup_time(traj.times(), traj.max_series(), traj.last().dt_last,
                                [f](double m) { return f.blowup_clock(m); });
}

// ---------------------------------------------------------------------------
// Driver

struct BlowupReport {
    TerminalStatus status = TerminalStatus::Running;
    double T_hat = std::numeric_limits<double>::infinity();
    double T_hat_uncertainty = std::numeric_limits<double>::quiet_NaN();
    bool fit_degenerate = false;
    double fit_r_squared = 0.0;
    std::vector<bool> blowup_set_mask;
    std::vector<std::pair<double, double>> max_location_series;
    std::vector<std::pair<double, double>> max_value_series;

    bool blowup_set_empty() const
    {
        return std::none_of(blowup_set_mask.begin(), blowup_set_mask.end(), [](bool b) { return b; });
    }
};

struct RunResult {
    Trajectory trajectory;
    BlowupReport report;
};

namespace detail {

inline long long growth_level(double max_u, int per_decade)
{
    if (!(max_u > 0.0))
        return std::numeric_limits<long long>::min();
    return static_cast<long long>(std::floor(per_decade * std::log10(max_u)));
}

inline double time_bin(double t, double interval)
{
    return std::isfinite(interval) ? std::floor(t / interval) : 0.0;
}

inline void thin(std::vector<SolutionState>& snaps, std::size_t max_count)
{
    if (snaps.size() <= max_count || snaps.size() < 4)
        return;
    // Drop every other frame from the older half; the first frame stays.
    const std::size_t half = snaps.size() / 2;
    std::vector<SolutionState> kept;
    kept.reserve(snaps.size());
    for (std::size_t i = 0; i < snaps.size(); ++i)
        if (i >= half || i % 2 == 0)
            kept.push_back(std::move(snaps[i]));
    snaps = std::move(kept);
}

} // namespace detail

inline BlowupReport build_report(const Trajectory& traj, const ProblemSpec& spec)
{
    BlowupReport rep;
    rep.status = traj.status;
    const auto& dom = spec.domain();
    for (const auto& s : traj.snapshots) {
        rep.max_value_series.emplace_back(s.t, s.max_u());
        rep.max_location_series.emplace_back(s.t, dom.coordinate(s.argmax()));
    }
    const auto& last = traj.last();
    rep.blowup_set_mask.assign(last.u.size(), false);
    if (traj.status != TerminalStatus::BlowupDetected)
        return rep;

    try {
        const auto est = estimate_blowup_time(traj, spec.nonlinearity());
        rep.T_hat = est.T_hat;
        rep.T_hat_uncertainty = est.uncertainty;
        rep.fit_degenerate = est.fit_degenerate;
        rep.fit_r_squared = est.r_squared;
    } catch (const Error& e) {
        if (e.code() != ErrorCode::InsufficientData)
            throw;
        rep.T_hat = last.t + last.dt_last;
        rep.T_hat_uncertainty = last.dt_last;
        rep.fit_degenerate = true;
    }
    // Blowup set: nodes that keep pace with the maximum. Over the last three
    // decades of growth of max u, a node must grow by at least half as many
    // decades. Bounded points saturate and drop out.
    const double top = last.max_u();
    const SolutionState* ref = &traj.snapshots.front();
    for (const auto& s : traj.snapshots)
        if (s.max_u() >= 1e-3 * top) {
            ref = &s;
            break;
        }
    const double span = std::log(top / ref->max_u());
    for (std::size_t i = 0; i < last.u.size(); ++i) {
        if (!(last.u[i] > 0.0))
            continue;
        if (span <= 0.0 || !(ref->u[i] > 0.0))
            rep.blowup_set_mask[i] = last.u[i] >= top * 0.5;
        else
            rep.blowup_set_mask[i] = std::log(last.u[i] / ref->u[i]) >= 0.5 * span;
    }
    if (std::none_of(rep.blowup_set_mask.begin(), rep.blowup_set_mask.end(), [](bool b) { return b; }))
        rep.blowup_set_mask[last.argmax()] = true;
    return rep;
}

/// Integrates until max u >= u_blow, dt < dt_min, t >= horizon, or the state
/// is steady. When `resume` is given, continues from its last snapshot.
inline RunResult run_to_blowup(const ProblemSpec& spec, const SolverOptions& opt, const Trajectory* resume = nullptr)
{
    require(opt.safety > 0.0 && opt.safety <= 1.0, ErrorCode::InvalidArgument, "safety must lie in (0, 1]");
    require(opt.u_blow > 0.0 && opt.u_blow < kSaturationLevel, ErrorCode::InvalidArgument, "u_blow out of range");
    require(opt.snapshots_per_decade >= 1, ErrorCode::InvalidArgument, "snapshots_per_decade must be >= 1");
    RunResult result;
    Trajectory& traj = result.trajectory;
    const double interval = opt.effective_interval();

    SolutionState state;
    long long best_level = std::numeric_limits<long long>::min();
    if (resume) {
        require(!resume->snapshots.empty(), ErrorCode::InvalidArgument, "cannot resume from an empty trajectory");
        require(resume->snapshots.front().u.size() == spec.domain().size(), ErrorCode::InvalidArgument,
                "resume trajectory does not match the grid");
        traj.snapshots = resume->snapshots;
        traj.events = resume->events;
        traj.events.push_back("resumed at step " + std::to_string(traj.snapshots.back().step_count));
        state = traj.snapshots.back();
        for (const auto& s : traj.snapshots)
            best_level = std::max(best_level, detail::growth_level(s.max_u(), opt.snapshots_per_decade));
    } else {
        state = initial_state(spec);
        traj.snapshots.push_back(state);
        best_level = detail::growth_level(state.max_u(), opt.snapshots_per_decade);
        const auto r0 = rhs(state.u, spec);
        if (std::all_of(r0.begin(), r0.end(), [](double v) { return v == 0.0; })) {
            traj.status = TerminalStatus::Steady;
            traj.events.push_back("initial data is an exact discrete steady state");
            result.report = build_report(traj, spec);
            return result;
        }
    }

    for (;;) {
        if (state.max_u() >= opt.u_blow) {
            traj.status = TerminalStatus::BlowupDetected;
            traj.events.push_back("max u reached u_blow");
            break;
        }
        if (state.t >= opt.horizon) {
            traj.status = TerminalStatus::TimeHorizonReached;
            traj.events.push_back("time horizon reached");
            break;
        }
        if (state.step_count >= opt.max_steps) {
            traj.status = TerminalStatus::TimeHorizonReached;
            traj.events.push_back("step budget exhausted");
            break;
        }
        double dt = adaptive_dt(state, spec, opt.safety);
        if (dt < opt.dt_min) {
            traj.status = TerminalStatus::BlowupDetected;
            traj.events.push_back("time step fell below dt_min");
            break;
        }
        if (state.t + dt > opt.horizon)
            dt = opt.horizon - state.t;
        SolutionState next = advance(state, spec, dt);

        const long long level = detail::growth_level(next.max_u(), opt.snapshots_per_decade);
        const bool grew = level > best_level;
        const bool ticked = detail::time_bin(next.t, interval) > detail::time_bin(state.t, interval);
        const bool terminal = next.max_u() >= opt.u_blow || next.t >= opt.horizon;
        state = std::move(next);
        if (!(grew || ticked || terminal))
            continue;
        best_level = std::max(best_level, level);
        if (ticked) {
            const auto& prev = traj.snapshots.back().u;
            double diff = 0.0, scale = 0.0;
            for (std::size_t i = 0; i < prev.size(); ++i) {
                diff = std::max(diff, std::abs(state.u[i] - prev[i]));
                scale = std::max(scale, std::abs(state.u[i]));
            }
            traj.snapshots.push_back(state);
            if (diff <= opt.steady_tol * scale) {
                traj.status = TerminalStatus::Steady;
                traj.events.push_back("relative change below steady tolerance");
                break;
            }
        } else {
            traj.snapshots.push_back(state);
        }
        detail::thin(traj.snapshots, opt.max_snapshots);
    }
    if (traj.snapshots.back().step_count != state.step_count)
        traj.snapshots.push_back(state);
    result.report = build_report(traj, spec);
    return result;
}

} // namespace blowup
