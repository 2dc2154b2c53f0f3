#pragma once

// `check <oracle> <args>`: standalone oracle evaluations as JSON with the
// inputs echoed back. Also the Richardson helper used by refinement sweeps.

#include <cmath>
#include <string>
#include <vector>

#include "blowup/harness/experiment.hpp"
#include "blowup/oracles/comparison.hpp"
#include "blowup/oracles/cutoff.hpp"
#include "blowup/oracles/heat_kernel.hpp"
#include "blowup/oracles/ode.hpp"

namespace blowup::harness {

struct OracleUsage {
    std::string name;
    std::vector<std::string> args;
};

inline const std::vector<OracleUsage>& oracle_usages()
{
    static const std::vector<OracleUsage> u = {
        {"ode", {"u0", "p", "A"}},
        {"comparison", {"p", "A", "k", "epsilon", "C_eps", "tau0"}},
        {"nondegeneracy-exponent", {"p", "k", "epsilon"}},
        {"cutoff", {"R", "l", "sigma"}},
        {"heat-kernel", {"t", "x", "y"}},
        {"critical", {"n", "p"}},
    };
    return u;
}

inline json run_check(const std::string& oracle, const std::vector<std::string>& args)
{
    const OracleUsage* usage = nullptr;
    for (const auto& u : oracle_usages())
        if (u.name == oracle)
            usage = &u;
    if (!usage)
        throw Error(ErrorCode::InvalidArgument, "unknown oracle '" + oracle + "'");
    if (args.size() != usage->args.size()) {
        std::string want;
        for (const auto& a : usage->args)
            want += " <" + a + ">";
        throw Error(ErrorCode::InvalidArgument, "usage: check " + oracle + want);
    }
    std::vector<double> v;
    json out{{"oracle", oracle}, {"inputs", json::object()}};
    for (std::size_t i = 0; i < args.size(); ++i) {
        v.push_back(csv::parse_double(args[i], usage->args[i]));
        out["inputs"][usage->args[i]] = v.back();
    }
    json r;
    if (oracle == "ode") {
        const auto o = oracles::exact_ode_blowup(v[0], v[1], v[2]);
        r = json{{"T", o.T}, {"alpha", o.alpha()}, {"amplitude", o.amplitude()}};
    } else if (oracle == "comparison") {
        const auto c = oracles::comparison_threshold_check(v[0], v[1], v[2], v[3], v[4], v[5]);
        r = json{{"ok", c.ok}, {"margin", number(c.margin)}, {"B", number(c.B)}};
    } else if (oracle == "nondegeneracy-exponent") {
        r = json{{"m", oracles::nondegeneracy_exponent(v[0], v[1], v[2])}};
    } else if (oracle == "cutoff") {
        const auto prof = oracles::cutoff_build(v[0], static_cast<int>(v[1]), v[2]);
        const auto g = oracles::cutoff_coefficients();
        r = json{{"C_inferred", prof.C_inferred}, {"coefficients", {g[0], g[1], g[2]}}, {"samples", prof.r.size()}};
    } else if (oracle == "heat-kernel") {
        const auto h = oracles::dirichlet_heat_kernel(v[0], v[1], v[2]);
        const auto hs = oracles::dirichlet_heat_kernel(v[0], v[2], v[1]);
        r = json{{"G", h.G},
                 {"G_swapped", hs.G},
                 {"flux", h.flux},
                 {"terms", h.terms},
                 {"tail_bound", h.tail_bound},
                 {"mass", oracles::heat_kernel_mass(v[0], v[1])}};
    } else {
        const auto k = critical_exponents(static_cast<int>(v[0]), v[1]);
        r = json{{"p_S", number(k.p_S)}, {"alpha", k.alpha}, {"kappa", k.kappa}, {"subcritical", k.subcritical}};
    }
    out["result"] = r;
    return out;
}

struct Richardson {
    double order = 0.0;
    double limit = 0.0;
    /// |T_k - T_{k+1}| for consecutive refinements.
    std::vector<double> differences;
};

/// Estimates the convergence order from the last three values (each grid
/// refined by `ratio`) and extrapolates the limit.
inline Richardson richardson(const std::vector<double>& values, double ratio = 2.0)
{
    require(values.size() >= 3, ErrorCode::InsufficientData, "Richardson extrapolation needs >= 3 refinements");
    Richardson r;
    for (std::size_t k = 1; k < values.size(); ++k)
        r.differences.push_back(std::abs(values[k] - values[k - 1]));
    const std::size_t n = values.size();
    const double d1 = values[n - 2] - values[n - 3], d2 = values[n - 1] - values[n - 2];
    require(d2 != 0.0 && d1 / d2 > 0.0, ErrorCode::InsufficientData, "refinement differences are not monotone");
    r.order = std::log(d1 / d2) / std::log(ratio);
    r.limit = values[n - 1] + d2 / (std::pow(ratio, r.order) - 1.0);
    return r;
}

} // namespace blowup::harness
