#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "blowup/error.hpp"

namespace blowup {

/// Ordinary least squares y = intercept + slope * x.
struct LinearFit {
    double intercept = 0.0;
    double slope = 0.0;
    double r_squared = 0.0;
    double var_intercept = 0.0;
    double var_slope = 0.0;
    double cov = 0.0;
    std::size_t n = 0;

    double operator()(double x) const { return intercept + slope * x; }

    /// Root of the fitted line and its standard error by the delta method.
    std::pair<double, double> root() const
    {
        const double x0 = -intercept / slope;
        const double g_a = -1.0 / slope;
        const double g_b = intercept / (slope * slope);
        const double var = g_a * g_a * var_intercept + g_b * g_b * var_slope + 2.0 * g_a * g_b * cov;
        return {x0, std::sqrt(std::max(var, 0.0))};
    }
};

inline LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y)
{
    require(x.size() == y.size(), ErrorCode::InvalidArgument, "fit_line: size mismatch");
    require(x.size() >= 2, ErrorCode::InsufficientData, "fit_line needs at least two points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    require(sxx > 0.0, ErrorCode::InsufficientData, "fit_line: abscissae are all equal");

    LinearFit fit;
    fit.n = x.size();
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double sse = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - fit(x[i]);
        sse += r * r;
    }
    fit.r_squared = syy > 0.0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 1.0;
    const double s2 = x.size() > 2 ? sse / (n - 2.0) : 0.0;
    fit.var_slope = s2 / sxx;
    fit.var_intercept = s2 * (1.0 / n + mx * mx / sxx);
    fit.cov = -mx * s2 / sxx;
    return fit;
}

} // namespace blowup
