#pragma once

// Cutoff phi_R(x) = psi(|x|/R): 1 for s <= 1/2, 0 for s >= 2/3, and
// psi = h^l in between, where h is the degree-6 polynomial in d = 2/3 - s
//   h = d^3 + g1 d^4 + g2 d^5 + g3 d^6
// with h(1/2) = 1, h'(1/2) = h''(1/2) = 0. The d^3 leading term gives the
// contact data h = h' = h'' = 0, h''' = -6 at s = 2/3.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "blowup/csv.hpp"
#include "blowup/error.hpp"

namespace blowup::oracles {

inline constexpr double kCutoffInner = 0.5;
inline constexpr double kCutoffOuter = 2.0 / 3.0;

/// Coefficients g1..g3 from the 3x3 plateau conditions at d = 1/6.
inline std::array<double, 3> cutoff_coefficients()
{
    const double d = kCutoffOuter - kCutoffInner;
    // Rows: h, h_d, h_dd at d; unknowns multiply d^4, d^5, d^6.
    const double A[3][3] = {
        {std::pow(d, 4), std::pow(d, 5), std::pow(d, 6)},
        {4 * std::pow(d, 3), 5 * std::pow(d, 4), 6 * std::pow(d, 5)},
        {12 * d * d, 20 * std::pow(d, 3), 30 * std::pow(d, 4)},
    };
    const double rhs[3] = {1.0 - std::pow(d, 3), -3.0 * d * d, -6.0 * d};
    const auto det3 = [](const double M[3][3]) {
        return M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]) - M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0]) +
               M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]);
    };
    const double D = det3(A);
    std::array<double, 3> g{};
    for (int c = 0; c < 3; ++c) {
        double Ac[3][3];
        for (int r = 0; r < 3; ++r)
            for (int k = 0; k < 3; ++k)
                Ac[r][k] = k == c ? rhs[r] : A[r][k];
        g[static_cast<std::size_t>(c)] = det3(Ac) / D;
    }
    return g;
}

/// h and its first three derivatives with respect to s.
struct CutoffPoly {
    std::array<double, 3> g = cutoff_coefficients();

    std::array<double, 4> eval(double s) const
    {
        const double d = kCutoffOuter - s;
        const double c[7] = {0, 0, 0, 1.0, g[0], g[1], g[2]};
        double h = 0, hd = 0, hdd = 0, hddd = 0;
        for (int k = 3; k <= 6; ++k) {
            h += c[k] * std::pow(d, k);
            hd += k * c[k] * std::pow(d, k - 1);
            hdd += k * (k - 1) * c[k] * std::pow(d, k - 2);
            hddd += k * (k - 1) * (k - 2) * c[k] * std::pow(d, k - 3);
        }
        // d/ds = -d/dd
        return {h, -hd, hdd, -hddd};
    }
};

struct CutoffFeasibility {
    bool gradient_ok = false;  // |grad phi|^2 ~ d^(2(3l-1)) dominates phi^sigma ~ d^(3l sigma)
    bool laplacian_ok = false; // |Lap phi^2| ~ d^(6l-2)
    double gradient_exponent = 0.0;
    double laplacian_exponent = 0.0;
    double target_exponent = 0.0;
};

inline CutoffFeasibility cutoff_feasibility(int l, double sigma)
{
    CutoffFeasibility f;
    f.gradient_exponent = 2.0 * (3.0 * l - 1.0);
    f.laplacian_exponent = 6.0 * l - 2.0;
    f.target_exponent = sigma * 3.0 * l;
    f.gradient_ok = f.gradient_exponent >= f.target_exponent;
    f.laplacian_ok = f.laplacian_exponent >= f.target_exponent;
    return f;
}

struct CutoffProfile {
    double R = 1.0;
    double sigma = 1.0;
    int l = 2;
    int n = 1;
    std::vector<double> r;
    std::vector<double> phi;
    /// max over {phi > 0} of (|grad phi|^2 + |Lap phi^2|) / phi^sigma.
    double C_inferred = 0.0;
    CutoffFeasibility feasibility;

    double operator()(double x) const { return evaluate(std::abs(x) / R); }

    double evaluate(double s) const
    {
        if (s <= kCutoffInner)
            return 1.0;
        if (s >= kCutoffOuter)
            return 0.0;
        return std::pow(CutoffPoly{}.eval(s)[0], l);
    }
};

/// Samples phi_R on `samples` radii in [0, R] and infers C. `n` is the space
/// dimension used for the radial Laplacian.
inline CutoffProfile cutoff_build(double R, int l, double sigma, std::size_t samples = 4001, int n = 1)
{
    require(R > 0.0, ErrorCode::InvalidArgument, "R must be > 0");
    require(l >= 2, ErrorCode::InvalidArgument, "l must be >= 2");
    require(sigma > 0.0 && sigma < 2.0, ErrorCode::InvalidArgument, "sigma must lie in (0, 2)");
    require(samples >= 16 && n >= 1, ErrorCode::InvalidArgument, "need >= 16 samples and n >= 1");
    CutoffProfile prof;
    prof.R = R;
    prof.sigma = sigma;
    prof.l = l;
    prof.n = n;
    prof.feasibility = cutoff_feasibility(l, sigma);
    if (!prof.feasibility.gradient_ok || !prof.feasibility.laplacian_ok) {
        std::string which;
        if (!prof.feasibility.gradient_ok)
            which += "2(3l-1) = " + csv::format(prof.feasibility.gradient_exponent);
        if (!prof.feasibility.laplacian_ok)
            which += std::string(which.empty() ? "" : ", ") + "6l-2 = " +
                     csv::format(prof.feasibility.laplacian_exponent);
        throw Error(ErrorCode::Infeasible, which + " < 3l*sigma = " + csv::format(prof.feasibility.target_exponent) +
                                               " for l = " + std::to_string(l));
    }
    const CutoffPoly poly;
    const double L = static_cast<double>(l);
    for (std::size_t i = 0; i < samples; ++i) {
        const double rad = R * static_cast<double>(i) / static_cast<double>(samples - 1);
        const double s = rad / R;
        prof.r.push_back(rad);
        prof.phi.push_back(prof.evaluate(s));
        if (!(s > kCutoffInner && s < kCutoffOuter))
            continue;
        const auto [h, h1, h2, h3] = poly.eval(s);
        (void)h3;
        const double psi = std::pow(h, L);
        const double psi1 = L * std::pow(h, L - 1) * h1;
        // phi^2 = h^(2l): first and second derivatives in s.
        const double q1 = 2 * L * std::pow(h, 2 * L - 1) * h1;
        const double q2 = 2 * L * ((2 * L - 1) * std::pow(h, 2 * L - 2) * h1 * h1 + std::pow(h, 2 * L - 1) * h2);
        const double grad2 = psi1 * psi1 / (R * R);
        const double lap = q2 / (R * R) + (n - 1) / rad * q1 / R;
        if (psi > 0.0)
            prof.C_inferred = std::max(prof.C_inferred, (grad2 + std::abs(lap)) / std::pow(psi, sigma));
    }
    return prof;
}

} // namespace blowup::oracles
