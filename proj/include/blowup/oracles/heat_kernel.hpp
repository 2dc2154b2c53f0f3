#pragma once

// Dirichlet heat kernel of (0, 1):
//   G(t, x, y) = sum_k 2 sin(k pi x) sin(k pi y) exp(-k^2 pi^2 t)

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "blowup/error.hpp"

namespace blowup::oracles {

inline constexpr double kHeatKernelTail = 1e-12;

struct HeatKernelValue {
    double G = 0.0;
    /// dG/dy at y = 0.
    double flux = 0.0;
    std::size_t terms = 0;
    double tail_bound = 0.0;
};

/// Bound on sum_{k > K} c k^m exp(-k^2 pi^2 t) for m in {0, 1}, using the
/// ratio of consecutive terms beyond K + 1.
inline double heat_kernel_tail(double t, std::size_t K, int m)
{
    const double pi2t = std::numbers::pi * std::numbers::pi * t;
    const double k1 = static_cast<double>(K + 1);
    const double first = 2.0 * std::pow(k1 * std::numbers::pi, m) * std::exp(-k1 * k1 * pi2t);
    // term ratio (k+1)^m/k^m exp(-(2k+1) pi^2 t) <= 2^m exp(-(2K+3) pi^2 t)
    const double ratio = std::pow(2.0, m) * std::exp(-(2.0 * k1 + 1.0) * pi2t);
    if (ratio >= 1.0)
        return std::numeric_limits<double>::infinity();
    return first / (1.0 - ratio);
}

inline std::size_t heat_kernel_terms(double t)
{
    std::size_t K = 1;
    while (std::max(heat_kernel_tail(t, K, 0), heat_kernel_tail(t, K, 1)) >= kHeatKernelTail)
        K = K < 16 ? K + 1 : K + K / 4;
    return K;
}

/// `n_terms` = 0 picks the smallest count whose tail bound is below 1e-12.
inline HeatKernelValue dirichlet_heat_kernel(double t, double x, double y, std::size_t n_terms = 0)
{
    require(t > 0.0, ErrorCode::InvalidArgument, "heat kernel needs t > 0");
    require(x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0, ErrorCode::InvalidArgument,
            "heat kernel needs x, y in [0, 1]");
    HeatKernelValue out;
    out.terms = n_terms ? n_terms : heat_kernel_terms(t);
    out.tail_bound = std::max(heat_kernel_tail(t, out.terms, 0), heat_kernel_tail(t, out.terms, 1));
    const double pi = std::numbers::pi;
    for (std::size_t k = 1; k <= out.terms; ++k) {
        const double kp = static_cast<double>(k) * pi;
        const double decay = std::exp(-kp * kp * t);
        const double sx = std::sin(kp * x);
        out.G += 2.0 * sx * std::sin(kp * y) * decay;
        out.flux += 2.0 * sx * kp * decay;
    }
    return out;
}

/// integral over y in [0, 1] of G(t, x, y), termwise in closed form.
inline double heat_kernel_mass(double t, double x, std::size_t n_terms = 0)
{
    require(t > 0.0, ErrorCode::InvalidArgument, "heat kernel needs t > 0");
    if (!n_terms && t < 0.05) {
        // Images of the odd 2-periodic extension of 1; the n = 0 term is
        // written as 1 - erfc so the result never rounds above 1.
        const double s = std::sqrt(4.0 * t);
        double mass = 1.0 - 0.5 * (std::erfc(x / s) + std::erfc((1.0 - x) / s));
        for (int n = -12; n <= 12; ++n)
            if (n != 0)
                mass += (n % 2 ? -0.5 : 0.5) * (std::erf((n + 1 - x) / s) - std::erf((n - x) / s));
        return mass;
    }
    const std::size_t K = n_terms ? n_terms : heat_kernel_terms(t);
    const double pi = std::numbers::pi;
    double mass = 0.0;
    for (std::size_t k = 1; k <= K; k += 2) {
        const double kp = static_cast<double>(k) * pi;
        // (1 - cos k pi) / (k pi) = 2 / (k pi) for odd k, 0 for even k
        mass += 2.0 * std::sin(kp * x) * (2.0 / kp) * std::exp(-kp * kp * t);
    }
    return mass;
}

struct HeatKernelSample {
    double t, x, y;
};

struct HeatKernelBoundFit {
    double c1 = 0.0;
    double c2 = 0.0;
    std::size_t violations = 0;
    std::size_t samples = 0;
};

/// c1 min(rho(x) rho(y) / t, 1) t^(-1/2) exp(-c2 |x-y|^2 / t), rho = distance to {0, 1}.
inline double heat_kernel_lower_shape(double t, double x, double y, double c1, double c2)
{
    const double rx = std::min(x, 1.0 - x), ry = std::min(y, 1.0 - y);
    return c1 * std::min(rx * ry / t, 1.0) / std::sqrt(t) * std::exp(-c2 * (x - y) * (x - y) / t);
}

inline std::size_t heat_kernel_bound_violations(const std::vector<HeatKernelSample>& samples, double c1, double c2)
{
    std::size_t bad = 0;
    for (const auto& s : samples)
        if (dirichlet_heat_kernel(s.t, s.x, s.y).G < heat_kernel_lower_shape(s.t, s.x, s.y, c1, c2))
            ++bad;
    return bad;
}

/// Scans c2 geometrically, takes the largest admissible c1 for each, keeps the
/// pair with the largest c1, then halves c1 as a safety margin.
inline HeatKernelBoundFit fit_heat_kernel_lower_bound(const std::vector<HeatKernelSample>& samples)
{
    require(!samples.empty(), ErrorCode::InsufficientData, "no heat kernel samples");
    std::vector<double> G;
    G.reserve(samples.size());
    for (const auto& s : samples)
        G.push_back(dirichlet_heat_kernel(s.t, s.x, s.y).G);
    HeatKernelBoundFit best;
    for (int e = -8; e <= 24; ++e) {
        const double c2 = std::pow(2.0, 0.25 * e);
        double c1 = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const auto& s = samples[i];
            const double shape = heat_kernel_lower_shape(s.t, s.x, s.y, 1.0, c2);
            if (shape > 0.0)
                c1 = std::min(c1, G[i] / shape);
        }
        if (std::isfinite(c1) && c1 > best.c1) {
            best.c1 = c1;
            best.c2 = c2;
        }
    }
    best.c1 *= 0.5;
    best.samples = samples.size();
    best.violations = heat_kernel_bound_violations(samples, best.c1, best.c2);
    return best;
}

} // namespace blowup::oracles
