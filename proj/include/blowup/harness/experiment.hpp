#pragma once

// One experiment: config -> validated spec -> solver run -> selected
// diagnostics and oracles -> flat metrics, assertions and a JSON report.
//
// Diagnostics are switched on with `diagnostics.<name> = true` and take their
// parameters from `diagnostics.<name>.<param>`. Assertions read
//   assert.<metric> = <op> <value> [tolerance]
// with op one of == != < <= > >= within; `off` drops an inherited assertion.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "blowup/diagnostics.hpp"
#include "blowup/harness/build.hpp"
#include "blowup/oracles/ode.hpp"
#include "blowup/oracles/supersolution.hpp"
#include "blowup/trajectory_io.hpp"
#include "blowup/zeroset.hpp"

namespace blowup::harness {

using json = nlohmann::ordered_json;

inline constexpr const char* kCodeVersion = "0.1.0";

/// Non-finite numbers become null so the report stays valid JSON.
inline json number(double v)
{
    if (std::isfinite(v))
        return v;
    return nullptr;
}

inline json not_applicable(const std::string& reason)
{
    return json{{"applicable", false}, {"reason", reason}};
}

struct Analysis {
    json blowup = json::object();
    json diagnostics = json::object();
    json oracles = json::object();
    json metrics = json::object();

    std::optional<DeviationSeries> deviation;
    std::optional<MonotoneCertificate> certificate;
    std::optional<IsolatingSubdomain> zeroset;
    std::vector<std::pair<double, double>> kaplan;
    /// t, even defect, max u_x on [0, L], max at origin (0/1).
    std::vector<std::array<double, 4>> symmetry;
};

struct Assertion {
    std::string metric;
    std::string op;
    std::string expected;
    double tolerance = 0.0;
    json observed;
    bool passed = false;
};

struct Experiment {
    Config config;
    std::optional<ProblemSpec> spec;
    ValidationReport validation;
    RunResult run;
    Analysis analysis;
    std::vector<Assertion> assertions;
    double wall_seconds = 0.0;
    json report;

    bool assertions_passed() const
    {
        for (const auto& a : assertions)
            if (!a.passed)
                return false;
        return true;
    }
};

namespace detail {

inline void put(json& metrics, const std::string& key, double v) { metrics[key] = number(v); }

inline std::size_t node_at(const Domain& dom, double x)
{
    require(x >= dom.lower() - 1e-12 && x <= dom.upper() + 1e-12, ErrorCode::InvalidArgument,
            "x = " + csv::format(x) + " lies outside the domain");
    return dom.nearest_node(x);
}

inline void analyze_blowup(const Config&, const ProblemSpec& spec, const RunResult& run, Analysis& a)
{
    const auto& traj = run.trajectory;
    const auto& rep = run.report;
    const auto& dom = spec.domain();
    const auto& last = traj.last();
    const bool blew = rep.status == TerminalStatus::BlowupDetected;

    json b;
    b["status"] = to_string(rep.status);
    b["final_time"] = last.t;
    b["final_max_u"] = number(last.max_u());
    b["final_argmax_x"] = dom.coordinate(last.argmax());
    b["steps"] = last.step_count;
    b["snapshots"] = traj.snapshots.size();
    b["dt_last"] = last.dt_last;
    b["events"] = traj.events;
    a.metrics["status"] = to_string(rep.status);
    put(a.metrics, "final_time", last.t);
    put(a.metrics, "final_max_u", last.max_u());
    put(a.metrics, "final_argmax_x", dom.coordinate(last.argmax()));
    a.metrics["steps"] = last.step_count;
    a.metrics["snapshots"] = traj.snapshots.size();
    if (!blew) {
        b["T_hat"] = not_applicable(std::string("run ended with ") + to_string(rep.status));
        b["blowup_set"] = not_applicable("no blowup");
        a.blowup = b;
        return;
    }
    b["T_hat"] = number(rep.T_hat);
    b["T_hat_uncertainty"] = number(rep.T_hat_uncertainty);
    b["fit_r_squared"] = number(rep.fit_r_squared);
    b["fit_degenerate"] = rep.fit_degenerate;
    put(a.metrics, "T_hat", rep.T_hat);
    put(a.metrics, "T_hat_uncertainty", rep.T_hat_uncertainty);
    put(a.metrics, "fit_r_squared", rep.fit_r_squared);
    a.metrics["fit_degenerate"] = rep.fit_degenerate;

    std::size_t count = 0;
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, min_abs = xmin;
    for (std::size_t i = 0; i < rep.blowup_set_mask.size(); ++i) {
        if (!rep.blowup_set_mask[i])
            continue;
        ++count;
        const double x = dom.coordinate(i);
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        min_abs = std::min(min_abs, std::abs(x));
    }
    json set{{"count", count}, {"x_min", number(xmin)}, {"x_max", number(xmax)}, {"min_abs_x", number(min_abs)}};
    a.metrics["blowup_set.count"] = count;
    put(a.metrics, "blowup_set.x_min", xmin);
    put(a.metrics, "blowup_set.x_max", xmax);
    put(a.metrics, "blowup_set.min_abs_x", min_abs);
    if (dom.lower() <= 0.0 && dom.upper() >= 0.0) {
        const bool excl = !rep.blowup_set_mask[dom.nearest_node(0.0)];
        set["excludes_origin"] = excl;
        a.metrics["blowup_set.excludes_origin"] = excl;
    }
    b["blowup_set"] = set;
    a.blowup = b;
}

inline void analyze_rate(const Config& c, const RunResult& run, Analysis& a)
{
    if (!c.flag("diagnostics.rate"))
        return;
    if (run.report.status != TerminalStatus::BlowupDetected) {
        a.diagnostics["rate"] = not_applicable("no blowup");
        return;
    }
    RateFitOptions o;
    o.u_lo = c.number("diagnostics.rate.u_lo", o.u_lo);
    o.u_hi = c.number("diagnostics.rate.u_hi", o.u_hi);
    o.exclude_fraction = c.number("diagnostics.rate.exclude_fraction", o.exclude_fraction);
    try {
        const RateFit f = fit_type_one_rate(run.trajectory, run.report.T_hat, o);
        a.diagnostics["rate"] = json{{"exponent_hat", number(f.exponent_hat)}, {"amplitude_hat", number(f.amplitude_hat)},
                                     {"r_squared", number(f.r_squared)},       {"t_lo", f.t_lo},
                                     {"t_hi", f.t_hi},                         {"points", f.points},
                                     {"type_one", f.type_one()}};
        put(a.metrics, "rate.exponent_hat", f.exponent_hat);
        put(a.metrics, "rate.amplitude_hat", f.amplitude_hat);
        put(a.metrics, "rate.r_squared", f.r_squared);
        a.metrics["rate.points"] = f.points;
    } catch (const Error& e) {
        a.diagnostics["rate"] = not_applicable(e.what());
    }
}

inline void analyze_deviation(const Config& c, const ProblemSpec& spec, const RunResult& run, Analysis& a)
{
    if (!c.flag("diagnostics.deviation"))
        return;
    if (!spec.nonlinearity().power_like()) {
        a.diagnostics["deviation"] = not_applicable("nonlinearity is not power-like");
        return;
    }
    try {
        const RegionMask mask = central_mask(spec.domain(), c.number("diagnostics.deviation.fraction", 0.5));
        const double target = c.number("diagnostics.deviation.target", 0.1);
        DeviationSeries d = ode_deviation(run.trajectory, spec, mask, c.number("diagnostics.deviation.u_threshold", 1e4),
                                          c.number("diagnostics.deviation.K_floor", 1e6));
        json sec;
        sec["points"] = d.ratio.size();
        if (d.ratio.empty()) {
            a.diagnostics["deviation"] = not_applicable("max u never reached the threshold");
            return;
        }
        const double final_max = d.max_u.back();
        std::size_t increases = 0, window = 0;
        double prev = std::numeric_limits<double>::quiet_NaN();
        for (std::size_t k = 0; k < d.ratio.size(); ++k) {
            if (d.max_u[k] < final_max / 100.0)
                continue;
            if (window++ > 0 && d.ratio[k] > prev)
                ++increases;
            prev = d.ratio[k];
        }
        double min_ratio = std::numeric_limits<double>::infinity();
        for (double r : d.ratio)
            min_ratio = std::min(min_ratio, r);
        sec["final_ratio"] = number(d.ratio.back());
        sec["min_ratio"] = number(min_ratio);
        sec["target"] = target;
        sec["fell_below_target"] = d.ratio.back() < target;
        sec["window_points"] = window;
        sec["window_increases"] = increases;
        sec["monotone_last_two_decades"] = increases == 0 && window >= 2;
        a.diagnostics["deviation"] = sec;
        put(a.metrics, "deviation.final_ratio", d.ratio.back());
        put(a.metrics, "deviation.min_ratio", min_ratio);
        a.metrics["deviation.fell_below_target"] = d.ratio.back() < target;
        a.metrics["deviation.window_increases"] = increases;
        a.metrics["deviation.monotone_last_two_decades"] = increases == 0 && window >= 2;
        a.deviation = std::move(d);
    } catch (const Error& e) {
        a.diagnostics["deviation"] = not_applicable(e.what());
    }
}

inline void analyze_zeroset(const Config& c, const ProblemSpec& spec, const RunResult& run, Analysis& a)
{
    if (!c.flag("diagnostics.zeroset"))
        return;
    const auto& dom = spec.domain();
    try {
        const std::size_t x0 = node_at(dom, c.number("diagnostics.zeroset.x0", 0.0));
        IsolatingSubdomain z = isolating_subdomain(spec.potential_samples(), dom, x0);
        json sec;
        const auto idx = z.omega0.indices();
        sec["m"] = z.m;
        sec["eta"] = number(z.eta);
        sec["threshold"] = z.threshold;
        sec["nodes"] = idx.size();
        sec["x_lo"] = dom.coordinate(idx.front());
        sec["x_hi"] = dom.coordinate(idx.back());
        double peak = 0.0;
        for (const auto& s : run.trajectory.snapshots)
            for (std::size_t i : idx)
                peak = std::max(peak, s.u[i]);
        bool disjoint = true;
        for (std::size_t i : idx)
            if (run.report.blowup_set_mask[i])
                disjoint = false;
        sec["max_u_on_omega0"] = number(peak);
        sec["disjoint_from_blowup_set"] = disjoint;
        a.diagnostics["zeroset"] = sec;
        a.metrics["zeroset.exploratory"] = false;
        put(a.metrics, "zeroset.m", z.m);
        put(a.metrics, "zeroset.eta", z.eta);
        put(a.metrics, "zeroset.x_lo", dom.coordinate(idx.front()));
        put(a.metrics, "zeroset.x_hi", dom.coordinate(idx.back()));
        put(a.metrics, "zeroset.max_u_on_omega0", peak);
        a.metrics["zeroset.disjoint_from_blowup_set"] = disjoint;
        a.zeroset = std::move(z);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::ZeroTouchesBoundary && e.code() != ErrorCode::NotAZero)
            throw;
        json sec = not_applicable(e.what());
        sec["exploratory"] = true;
        a.diagnostics["zeroset"] = sec;
        a.metrics["zeroset.exploratory"] = true;
    }
}

inline void analyze_j(const Config& c, const ProblemSpec& spec, const RunResult& run, Analysis& a)
{
    if (!c.flag("diagnostics.j"))
        return;
    const double eps = c.number("diagnostics.j.epsilon", 1e-3);
    const bool on_omega0 = a.zeroset.has_value() && c.flag("diagnostics.j.on_omega0", true);
    MonotoneCertificate cert =
        j_certificate(run.trajectory, spec, eps, on_omega0 ? &a.zeroset->omega0 : nullptr);
    json sec{{"epsilon", eps}, {"region", on_omega0 ? "omega0" : "interior"}, {"holds", cert.holds},
             {"t1", number(cert.t1)}, {"final_min_J", number(cert.min_J.back())}};
    a.diagnostics["j_certificate"] = sec;
    a.metrics["j.holds"] = cert.holds;
    put(a.metrics, "j.t1", cert.t1);
    put(a.metrics, "j.final_min_J", cert.min_J.back());
    a.certificate = std::move(cert);
}

inline void analyze_kaplan(const Config& c, const ProblemSpec& spec, const RunResult& run, Analysis& a)
{
    if (!c.flag("diagnostics.kaplan"))
        return;
    try {
        const double ell = c.number("diagnostics.kaplan.ell", 1.0);
        for (const auto& s : run.trajectory.snapshots)
            a.kaplan.emplace_back(s.t, kaplan_functional(s.u, spec.domain(), ell));
        std::size_t decreases = 0;
        for (std::size_t k = 1; k < a.kaplan.size(); ++k)
            if (a.kaplan[k].second < a.kaplan[k - 1].second)
                ++decreases;
        a.diagnostics["kaplan"] = json{{"ell", ell}, {"final", number(a.kaplan.back().second)},
                                       {"decreases", decreases}, {"nondecreasing", decreases == 0}};
        put(a.metrics, "kaplan.final", a.kaplan.back().second);
        a.metrics["kaplan.nondecreasing"] = decreases == 0;
    } catch (const Error& e) {
        a.kaplan.clear();
        a.diagnostics["kaplan"] = not_applicable(e.what());
    }
}

inline void analyze_symmetry(const Config& c, const ProblemSpec& spec, const RunResult& run, Analysis& a)
{
    if (!c.flag("diagnostics.symmetry"))
        return;
    try {
        const double L = c.number("diagnostics.symmetry.L", 1.0 / 3.0);
        double even = 0.0, ux = -std::numeric_limits<double>::infinity();
        bool origin = true, proven = true;
        for (const auto& s : run.trajectory.snapshots) {
            const auto r = symmetry_monotonicity_check(s.u, spec.domain(), L);
            const double scale = std::max(s.max_u(), 1.0);
            a.symmetry.push_back({s.t, r.even_defect / scale, r.ux_max / scale, r.max_at_origin ? 1.0 : 0.0});
            even = std::max(even, r.even_defect / scale);
            ux = std::max(ux, r.ux_max / scale);
            origin = origin && r.max_at_origin;
            proven = r.proven_regime;
        }
        a.diagnostics["symmetry"] = json{{"L", L},
                                         {"proven_regime", proven},
                                         {"max_even_defect_rel", number(even)},
                                         {"max_ux_rel", number(ux)},
                                         {"max_at_origin_always", origin}};
        put(a.metrics, "symmetry.max_even_defect_rel", even);
        put(a.metrics, "symmetry.max_ux_rel", ux);
        a.metrics["symmetry.max_at_origin_always"] = origin;
        a.metrics["symmetry.proven_regime"] = proven;
    } catch (const Error& e) {
        a.symmetry.clear();
        a.diagnostics["symmetry"] = not_applicable(e.what());
    }
}

inline void analyze_global(const Config& c, const ProblemSpec& spec, const RunResult& run, Analysis& a)
{
    if (!c.flag("diagnostics.global"))
        return;
    const auto& dom = spec.domain();
    const double level = c.number("diagnostics.global.threshold", 1e6);
    double weakest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < dom.size(); ++i) {
        if (dom.is_boundary_node(i))
            continue;
        double peak = 0.0;
        for (const auto& s : run.trajectory.snapshots)
            peak = std::max(peak, s.u[i]);
        weakest = std::min(weakest, peak);
    }
    a.diagnostics["global"] = json{{"threshold", level}, {"min_interior_peak", number(weakest)},
                                   {"all_exceed", weakest > level}};
    put(a.metrics, "global.min_interior_peak", weakest);
    a.metrics["global.all_exceed"] = weakest > level;
}

inline void analyze_nondegeneracy(const Config& c, const ProblemSpec& spec, const RunResult& run, Analysis& a)
{
    if (!c.flag("diagnostics.nondegeneracy"))
        return;
    if (!spec.constants()) {
        a.diagnostics["nondegeneracy"] = not_applicable("nonlinearity is not power-like");
        return;
    }
    if (run.report.status != TerminalStatus::BlowupDetected) {
        a.diagnostics["nondegeneracy"] = not_applicable("no blowup");
        return;
    }
    const auto& dom = spec.domain();
    const std::size_t x0 = c.has("diagnostics.nondegeneracy.x0") ? node_at(dom, c.number("diagnostics.nondegeneracy.x0"))
                                                                 : run.trajectory.last().argmax();
    const double A = c.number("diagnostics.nondegeneracy.A", spec.potential_samples()[x0]);
    const auto& k = *spec.constants();
    try {
        const auto r = nondegeneracy_check(run.trajectory, x0, A, k.alpha, k.kappa, run.report.T_hat,
                                           c.number("diagnostics.nondegeneracy.tolerance", 0.0));
        const double ratio = r.liminf_hat / r.threshold;
        a.diagnostics["nondegeneracy"] = json{{"x0", dom.coordinate(x0)}, {"A", A},
                                              {"liminf_hat", number(r.liminf_hat)}, {"threshold", r.threshold},
                                              {"ratio", number(ratio)}, {"satisfied", r.satisfied},
                                              {"points", r.points}};
        put(a.metrics, "nondegeneracy.liminf_hat", r.liminf_hat);
        put(a.metrics, "nondegeneracy.threshold", r.threshold);
        put(a.metrics, "nondegeneracy.ratio", ratio);
        a.metrics["nondegeneracy.satisfied"] = r.satisfied;
    } catch (const Error& e) {
        a.diagnostics["nondegeneracy"] = not_applicable(e.what());
    }
}

inline void analyze_weak_rate(const Config& c, const ProblemSpec& spec, const RunResult& run, Analysis& a)
{
    if (!c.flag("diagnostics.weak_rate"))
        return;
    const auto& f = spec.nonlinearity();
    if (f.kind() != Nonlinearity::Kind::LogPower) {
        a.diagnostics["weak_rate"] = not_applicable("nonlinearity is not u log^a(1+u)");
        return;
    }
    if (run.report.status != TerminalStatus::BlowupDetected) {
        a.diagnostics["weak_rate"] = not_applicable("no blowup");
        return;
    }
    WeakRateOptions o;
    o.u_lo = c.number("diagnostics.weak_rate.u_lo", o.u_lo);
    o.exclude_fraction = c.number("diagnostics.weak_rate.exclude_fraction", o.exclude_fraction);
    try {
        const auto w = weak_rate_fit(run.trajectory, spec.domain(), run.report.T_hat, f.parameter(), o);
        const double rel = std::abs(w.slope_hat - w.predicted) / w.predicted;
        a.diagnostics["weak_rate"] = json{{"slope_hat", number(w.slope_hat)}, {"predicted", w.predicted},
                                          {"relative_error", number(rel)},    {"r_squared", number(w.r_squared)},
                                          {"C1", number(w.C1)},               {"C2", number(w.C2)},
                                          {"sandwich_holds", w.sandwich_holds}, {"points", w.points}};
        put(a.metrics, "weak_rate.slope_hat", w.slope_hat);
        put(a.metrics, "weak_rate.predicted", w.predicted);
        put(a.metrics, "weak_rate.relative_error", rel);
        put(a.metrics, "weak_rate.r_squared", w.r_squared);
        a.metrics["weak_rate.sandwich_holds"] = w.sandwich_holds;
    } catch (const Error& e) {
        a.diagnostics["weak_rate"] = not_applicable(e.what());
    }
}

inline void analyze_monotone(const ProblemSpec& spec, const RunResult& run, Analysis& a)
{
    if (!spec.monotone_mode())
        return;
    const bool ok = monotone_in_time(run.trajectory);
    a.diagnostics["monotone_in_time"] = json{{"holds", ok}};
    a.metrics["monotone.holds"] = ok;
}

inline void oracle_ode(const Config& c, const ProblemSpec& spec, const RunResult& run, Analysis& a)
{
    if (!c.flag("oracles.ode", c.flag("diagnostics.ode_oracle")))
        return;
    const auto& V = spec.potential_samples();
    const auto& u0 = spec.initial_data();
    const bool flat = std::all_of(V.begin(), V.end(), [&](double v) { return v == V.front(); }) &&
                      std::all_of(u0.begin(), u0.end(), [&](double v) { return v == u0.front(); });
    if (!flat || spec.nonlinearity().kind() != Nonlinearity::Kind::Power ||
        spec.domain().boundary() != Boundary::Neumann) {
        a.oracles["ode"] = not_applicable("needs f = u^p, constant V and data, Neumann boundary");
        return;
    }
    if (run.report.status != TerminalStatus::BlowupDetected) {
        a.oracles["ode"] = not_applicable("no blowup");
        return;
    }
    const auto ode = oracles::exact_ode_blowup(u0.front(), spec.nonlinearity().exponent(), V.front());
    const double err = std::abs(run.report.T_hat - ode.T);
    a.oracles["ode"] = json{{"T_exact", ode.T}, {"T_hat", number(run.report.T_hat)}, {"abs_error", number(err)},
                            {"amplitude", ode.amplitude()}};
    put(a.metrics, "ode.T_exact", ode.T);
    put(a.metrics, "ode.T_error", err);
    put(a.metrics, "ode.amplitude", ode.amplitude());
}

inline void oracle_supersolution(const Config& c, const ProblemSpec& spec, const RunResult& run, Analysis& a)
{
    if (!c.flag("diagnostics.supersolution"))
        return;
    const auto& f = spec.nonlinearity();
    if (!f.power_like() || run.report.status != TerminalStatus::BlowupDetected) {
        a.oracles["supersolution"] = not_applicable("needs a power-like nonlinearity and a blowup run");
        return;
    }
    oracles::SupersolutionSearch in;
    in.M = c.number("diagnostics.supersolution.M", 1.0);
    in.rho = c.number("diagnostics.supersolution.rho", 0.5);
    in.x0 = c.number("diagnostics.supersolution.x0", c.number("diagnostics.zeroset.x0", 0.0));
    in.T = run.report.T_hat;
    in.C = c.number("diagnostics.supersolution.C", 1.0);
    in.p = f.exponent();
    in.V = [&spec](double x) { return spec.potential()(x); };
    in.trajectory = &run.trajectory;
    in.domain = &spec.domain();
    try {
        const auto fit = oracles::find_supersolution(in);
        a.oracles["supersolution"] = json{{"M", in.M},
                                          {"K", fit.w.K},
                                          {"r", fit.w.r},
                                          {"beta", fit.w.beta},
                                          {"condition_min", number(fit.residual.condition_min)},
                                          {"min_residual", number(fit.residual.min_residual)},
                                          {"worst_ratio", number(fit.worst_ratio)},
                                          {"dominates", fit.dominates}};
        put(a.metrics, "supersolution.K", fit.w.K);
        put(a.metrics, "supersolution.r", fit.w.r);
        put(a.metrics, "supersolution.beta", fit.w.beta);
        put(a.metrics, "supersolution.condition_min", fit.residual.condition_min);
        put(a.metrics, "supersolution.min_residual", fit.residual.min_residual);
        put(a.metrics, "supersolution.worst_ratio", fit.worst_ratio);
        a.metrics["supersolution.dominates"] = fit.dominates;
    } catch (const Error& e) {
        a.oracles["supersolution"] = not_applicable(e.what());
        a.metrics["supersolution.dominates"] = false;
    }
}

} // namespace detail

/// Everything computed from (config, spec, run); no I/O.
inline Analysis analyze(const Config& c, const ProblemSpec& spec, const RunResult& run)
{
    Analysis a;
    detail::analyze_blowup(c, spec, run, a);
    detail::analyze_rate(c, run, a);
    detail::analyze_deviation(c, spec, run, a);
    detail::analyze_zeroset(c, spec, run, a);
    detail::analyze_j(c, spec, run, a);
    detail::analyze_kaplan(c, spec, run, a);
    detail::analyze_symmetry(c, spec, run, a);
    detail::analyze_global(c, spec, run, a);
    detail::analyze_nondegeneracy(c, spec, run, a);
    detail::analyze_weak_rate(c, spec, run, a);
    detail::analyze_monotone(spec, run, a);
    detail::oracle_ode(c, spec, run, a);
    detail::oracle_supersolution(c, spec, run, a);
    return a;
}

inline Assertion evaluate_assertion(const std::string& metric, const std::string& rule, const json& metrics)
{
    Assertion as;
    as.metric = metric;
    std::istringstream in(rule);
    in >> as.op >> as.expected;
    std::string tol;
    in >> tol;
    static const std::vector<std::string> ops = {"==", "!=", "<", "<=", ">", ">=", "within"};
    if (std::find(ops.begin(), ops.end(), as.op) == ops.end() || as.expected.empty())
        throw Error(ErrorCode::Parse, "assert." + metric + ": expected '<op> <value>', got '" + rule + "'");
    if (as.op == "within") {
        if (tol.empty())
            throw Error(ErrorCode::Parse, "assert." + metric + ": 'within' needs a tolerance");
        as.tolerance = csv::parse_double(tol, "assert." + metric + " tolerance");
    }
    if (!metrics.contains(metric)) {
        as.observed = "missing";
        return as;
    }
    as.observed = metrics[metric];
    const json& v = metrics[metric];
    if (v.is_string()) {
        if (as.op == "==")
            as.passed = v.get<std::string>() == as.expected;
        else if (as.op == "!=")
            as.passed = v.get<std::string>() != as.expected;
        return as;
    }
    if (v.is_null())
        return as;
    const double x = v.is_boolean() ? (v.get<bool>() ? 1.0 : 0.0) : v.get<double>();
    double e = 0.0;
    if (as.expected == "true")
        e = 1.0;
    else if (as.expected == "false")
        e = 0.0;
    else
        e = csv::parse_double(as.expected, "assert." + metric);
    if (as.op == "==") as.passed = x == e;
    else if (as.op == "!=") as.passed = x != e;
    else if (as.op == "<") as.passed = x < e;
    else if (as.op == "<=") as.passed = x <= e;
    else if (as.op == ">") as.passed = x > e;
    else if (as.op == ">=") as.passed = x >= e;
    else as.passed = std::abs(x - e) <= as.tolerance;
    return as;
}

inline std::vector<Assertion> evaluate_assertions(const Config& c, const json& metrics)
{
    std::vector<Assertion> out;
    for (const auto& key : c.keys_with_prefix("assert."))
        if (c.get(key) != "off")
            out.push_back(evaluate_assertion(key.substr(7), c.get(key), metrics));
    return out;
}

inline json validation_json(const ValidationReport& v)
{
    json checks = json::array();
    for (const auto& h : v.checks) {
        json j{{"name", h.name}, {"status", to_string(h.status)}, {"offending", h.offending.size()}};
        if (!h.note.empty())
            j["note"] = h.note;
        if (!std::isnan(h.value))
            j["value"] = number(h.value);
        checks.push_back(j);
    }
    return json{{"all_passed", v.all_passed()}, {"checks", checks}};
}

inline json assemble_report(const Experiment& e)
{
    const auto& dom = e.spec->domain();
    json cfg = json::object();
    for (const auto& [k, v] : e.config.values())
        cfg[k] = v;
    json rep;
    rep["name"] = e.config.get("name", "experiment");
    rep["provenance"] = json{{"code_version", kCodeVersion},
                             {"config", cfg},
                             {"config_dir", e.config.base_dir().string()},
                             {"grid", json{{"domain", dom.describe()}, {"points", dom.size()}, {"spacing", dom.spacing()}}},
                             {"wall_seconds", e.wall_seconds}};
    rep["validation"] = validation_json(e.validation);
    rep["blowup"] = e.analysis.blowup;
    rep["diagnostics"] = e.analysis.diagnostics;
    rep["oracles"] = e.analysis.oracles;
    json asserts = json::array();
    for (const auto& a : e.assertions) {
        json j{{"metric", a.metric}, {"op", a.op}, {"expected", a.expected}, {"observed", a.observed}, {"passed", a.passed}};
        if (a.op == "within")
            j["tolerance"] = a.tolerance;
        asserts.push_back(j);
    }
    rep["assertions"] = json{{"all_passed", e.assertions_passed()}, {"items", asserts}};
    rep["metrics"] = e.analysis.metrics;
    return rep;
}

/// Validates, runs and analyzes. Invalid hypotheses abort unless
/// `allow_invalid = true`, in which case the report records them.
inline Experiment run_experiment(const Config& config)
{
    config.check_known(known_keys());
    Experiment e;
    e.config = config;
    try {
        e.spec.emplace(build_spec(config));
        e.validation = validate_config_spec(config, *e.spec);
    } catch (const Error& err) {
        throw Error(err.code(), "experiment '" + config.get("name", "experiment") + "': " + err.what());
    }
    if (!e.validation.all_passed() && !config.flag("allow_invalid")) {
        std::string failed;
        for (const auto& h : e.validation.checks)
            if (!h.passed())
                failed += (failed.empty() ? "" : ", ") + h.name + (h.note.empty() ? "" : " (" + h.note + ")");
        throw Error(ErrorCode::InvalidArgument,
                    "experiment '" + config.get("name", "experiment") + "' fails its hypotheses: " + failed);
    }
    const SolverOptions opt = build_solver_options(config);
    const auto start = std::chrono::steady_clock::now();
    if (config.has("resume.dir")) {
        const Trajectory stored = read_trajectory(config.path("resume.dir"));
        const auto id = static_cast<std::size_t>(
            config.integer("resume.snapshot", static_cast<long long>(stored.snapshots.size() / 2)));
        const Trajectory head = stored.prefix(id);
        e.run = run_to_blowup(*e.spec, opt, &head);
    } else {
        e.run = run_to_blowup(*e.spec, opt);
    }
    e.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    e.analysis = analyze(config, *e.spec, e.run);
    e.assertions = evaluate_assertions(config, e.analysis.metrics);
    e.report = assemble_report(e);
    return e;
}

} // namespace blowup::harness
