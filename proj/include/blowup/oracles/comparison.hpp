#pragma once

#include <cmath>
#include <string>

#include "blowup/csv.hpp"
#include "blowup/error.hpp"

namespace blowup::oracles {

struct ComparisonCheck {
    bool ok = false;
    double margin = 0.0;
    double B = 0.0;
};

/// B is the midpoint of (k A^-alpha, kappa A^-alpha); the comparison function
/// B (T - t)^-alpha is a supersolution of the perturbed ODE on (T - tau0, T)
/// when B alpha - A B^p - eps >= C_eps tau0^(p alpha).
inline ComparisonCheck comparison_threshold_check(double p, double A, double k, double epsilon, double C_eps,
                                                  double tau0)
{
    require(p > 1.0 && A > 0.0, ErrorCode::InvalidArgument, "comparison check needs p > 1, A > 0");
    const double alpha = 1.0 / (p - 1.0);
    const double kappa = std::pow(alpha, alpha);
    require(k > 0.0, ErrorCode::InvalidArgument, "k must be > 0");
    if (!(k < kappa))
        throw Error(ErrorCode::InvalidArgument, "k = " + csv::format(k) + " must be below kappa = " +
                                                    csv::format(kappa));
    ComparisonCheck out;
    out.B = 0.5 * (k + kappa) * std::pow(A, -alpha);
    out.margin = out.B * alpha - A * std::pow(out.B, p) - epsilon - C_eps * std::pow(tau0, p * alpha);
    out.ok = out.margin >= 0.0;
    return out;
}

/// m = (1 + 2 eps) k^(p-1); usable only when m < alpha.
inline double nondegeneracy_exponent(double p, double k, double epsilon)
{
    require(p > 1.0 && k > 0.0 && epsilon > 0.0, ErrorCode::InvalidArgument,
            "exponent needs p > 1, k > 0, eps > 0");
    const double m = (1.0 + 2.0 * epsilon) * std::pow(k, p - 1.0);
    const double alpha = 1.0 / (p - 1.0);
    if (!(m < alpha))
        throw Error(ErrorCode::Infeasible, "m = " + csv::format(m) + " is not below alpha = " + csv::format(alpha) +
                                               "; decrease eps or k");
    return m;
}

} // namespace blowup::oracles
