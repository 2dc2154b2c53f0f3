#pragma once

// Config -> ProblemSpec / SolverOptions, plus the key vocabulary.

#include <cmath>
#include <string>
#include <vector>

#include "blowup/harness/config.hpp"
#include "blowup/problem.hpp"
#include "blowup/solver.hpp"

namespace blowup::harness {

inline const std::vector<std::string>& known_keys()
{
    static const std::vector<std::string> keys = {
        "name", "preset", "description", "allow_invalid", "monotone",
        "domain.*", "potential.*", "nonlinearity.*", "initial.*",
        "solver.*", "output.*", "diagnostics.*", "hypothesis.*",
        "oracles.*", "assert.*", "sweep.*", "resume.*",
    };
    return keys;
}

inline Boundary parse_boundary(const std::string& s)
{
    if (s == "dirichlet")
        return Boundary::DirichletZero;
    if (s == "neumann")
        return Boundary::Neumann;
    throw Error(ErrorCode::InvalidArgument, "domain.boundary must be dirichlet or neumann, got '" + s + "'");
}

inline Domain build_domain(const Config& c)
{
    const std::string kind = c.get("domain.kind", "interval");
    const auto points = static_cast<std::size_t>(c.integer("domain.points", 256));
    const Boundary bc = parse_boundary(c.get("domain.boundary", "dirichlet"));
    if (kind == "interval")
        return Domain::interval(c.number("domain.a", -1.0), c.number("domain.b", 1.0), points, bc);
    if (kind == "ball")
        return Domain::ball(static_cast<int>(c.integer("domain.n", 1)), c.number("domain.R", 1.0), points, bc);
    if (kind == "annulus")
        return Domain::annulus(static_cast<int>(c.integer("domain.n", 1)), c.number("domain.r1"),
                               c.number("domain.r2"), points, bc);
    throw Error(ErrorCode::InvalidArgument, "unknown domain.kind '" + kind + "'");
}

/// Shared by potential.* and initial.*.
inline Field build_field(const Config& c, const std::string& section, double default_value)
{
    const std::string kind = c.get(section + ".kind", "constant");
    if (kind == "constant")
        return Field::constant(c.number(section + ".value", default_value));
    if (kind == "power")
        return Field::power_of_radius(c.number(section + ".sigma"));
    if (kind == "expression")
        return Field::expression(c.get(section + ".expr"));
    if (kind == "csv")
        return Field::from_csv(c.path(section + ".file"));
    throw Error(ErrorCode::InvalidArgument, "unknown " + section + ".kind '" + kind + "'");
}

inline Nonlinearity build_nonlinearity(const Config& c)
{
    const std::string kind = c.get("nonlinearity.kind", "power");
    if (kind == "power")
        return Nonlinearity::power(c.number("nonlinearity.p", 2.0));
    if (kind == "shifted_power")
        return Nonlinearity::shifted_power(c.number("nonlinearity.p", 2.0));
    if (kind == "exponential")
        return Nonlinearity::exponential();
    if (kind == "log_power")
        return Nonlinearity::log_power(c.number("nonlinearity.a", 1.5));
    throw Error(ErrorCode::InvalidArgument, "unknown nonlinearity.kind '" + kind + "'");
}

inline ProblemSpec build_spec(const Config& c)
{
    const Domain dom = build_domain(c);
    const Field u0 = build_field(c, "initial", 1.0);
    std::vector<double> data = u0.sample(dom.coordinates());
    const double scale = c.number("initial.scale", 1.0);
    for (double& v : data)
        v *= scale;
    return ProblemSpec(dom, build_field(c, "potential", 1.0), build_nonlinearity(c), std::move(data),
                       c.flag("monotone"));
}

inline SolverOptions build_solver_options(const Config& c)
{
    SolverOptions o;
    o.u_blow = c.number("solver.u_blow", o.u_blow);
    o.dt_min = c.number("solver.dt_min", o.dt_min);
    o.safety = c.number("solver.safety", o.safety);
    o.horizon = c.number("solver.horizon", o.horizon);
    o.snapshots_per_decade = static_cast<int>(c.integer("solver.snapshots_per_decade", o.snapshots_per_decade));
    o.snapshot_interval = c.number("solver.snapshot_interval", o.snapshot_interval);
    o.max_snapshots = static_cast<std::size_t>(c.integer("solver.max_snapshots", static_cast<long long>(o.max_snapshots)));
    o.max_steps = static_cast<std::size_t>(c.integer("solver.max_steps", static_cast<long long>(o.max_steps)));
    o.steady_tol = c.number("solver.steady_tol", o.steady_tol);
    require(o.u_blow > 0.0 && o.dt_min > 0.0 && o.safety > 0.0 && o.safety <= 1.0 && o.horizon > 0.0,
            ErrorCode::InvalidArgument, "solver needs u_blow, dt_min, horizon > 0 and safety in (0, 1]");
    require(o.snapshots_per_decade > 0, ErrorCode::InvalidArgument, "solver.snapshots_per_decade must be > 0");
    return o;
}

/// Reflection hypotheses for the weak-nonlinearity presets on (-1, 1):
/// V and u0 nonincreasing on [0, 1/3], and 0 <= V <= V(1/3) on [1/3, 1].
inline std::vector<HypothesisCheck> reflection_hypotheses(const ProblemSpec& spec)
{
    const auto& dom = spec.domain();
    const auto& V = spec.potential_samples();
    const auto& u0 = spec.initial_data();
    const double third = 1.0 / 3.0;
    const double V3 = spec.potential()(third);
    const auto scale = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double x : v)
            m = std::max(m, std::abs(x));
        return std::max(m, 1.0);
    };
    const double tolV = 1e-12 * scale(V), tolU = 1e-12 * scale(u0);

    HypothesisCheck dV("reflection_V_nonincreasing");
    HypothesisCheck du("reflection_u0_nonincreasing");
    HypothesisCheck bound("reflection_V_bounded_outside");
    for (std::size_t i = 0; i + 1 < dom.size(); ++i) {
        const double x = dom.coordinate(i), x1 = dom.coordinate(i + 1);
        if (x >= 0.0 && x1 <= third + 1e-12) {
            if (V[i + 1] > V[i] + tolV)
                dV.offending.push_back(i);
            if (u0[i + 1] > u0[i] + tolU)
                du.offending.push_back(i);
        }
    }
    for (std::size_t i = 0; i < dom.size(); ++i) {
        const double x = dom.coordinate(i);
        if (x >= third && (V[i] < -tolV || V[i] > V3 + tolV))
            bound.offending.push_back(i);
    }
    for (auto* h : {&dV, &du, &bound}) {
        h->status = h->offending.empty() ? HypothesisCheck::Status::Pass : HypothesisCheck::Status::Fail;
        if (!dom.symmetric_about_zero() || dom.upper() < 1.0) {
            h->status = HypothesisCheck::Status::Fail;
            h->note = "needs a symmetric interval containing [-1, 1]";
        }
    }
    return {dV, du, bound};
}

inline ValidationReport validate_config_spec(const Config& c, const ProblemSpec& spec)
{
    ValidationReport rep = validate_hypotheses(spec);
    if (c.flag("hypothesis.reflection"))
        for (auto& h : reflection_hypotheses(spec))
            rep.checks.push_back(std::move(h));
    return rep;
}

} // namespace blowup::harness
