#pragma once

#include <cmath>

#include "blowup/error.hpp"

namespace blowup::oracles {

/// Flat solution of u' = A u^p, u(0) = u0.
struct OdeBlowup {
    double u0;
    double p;
    double A;
    double T;

    double alpha() const { return 1.0 / (p - 1.0); }
    double operator()(double t) const { return std::pow((p - 1.0) * A * (T - t), -alpha()); }
    /// (T - t)^alpha u(t), constant along the solution.
    double amplitude() const { return std::pow(alpha(), alpha()) * std::pow(A, -alpha()); }
};

inline OdeBlowup exact_ode_blowup(double u0, double p, double A)
{
    require(u0 > 0.0 && p > 1.0 && A > 0.0, ErrorCode::InvalidArgument,
            "exact ODE blowup needs u0 > 0, p > 1, A > 0");
    return {u0, p, A, std::pow(u0, 1.0 - p) / ((p - 1.0) * A)};
}

} // namespace blowup::oracles
