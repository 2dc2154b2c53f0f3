#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <tuple>
#include <utility>

#include "blowup/error.hpp"

namespace blowup {

/// Above this magnitude of u the reaction term is reported as saturated.
inline constexpr double kSaturationLevel = 1e250;

struct ReactionValue {
    double f;
    double df;
    bool saturated;
};

class Nonlinearity {
public:
    enum class Kind { Power, ShiftedPower, Exponential, LogPower };

    static Nonlinearity power(double p)
    {
        require(p > 1.0, ErrorCode::InvalidArgument, "power nonlinearity needs p > 1");
        return {Kind::Power, p};
    }
    static Nonlinearity shifted_power(double p)
    {
        require(p > 1.0, ErrorCode::InvalidArgument, "shifted power nonlinearity needs p > 1");
        return {Kind::ShiftedPower, p};
    }
    static Nonlinearity exponential() { return {Kind::Exponential, 1.0}; }
    static Nonlinearity log_power(double a)
    {
        require(a > 1.0 && a < 2.0, ErrorCode::InvalidArgument, "log-power nonlinearity needs 1 < a < 2");
        return {Kind::LogPower, a};
    }

    Kind kind() const noexcept { return kind_; }
    /// p for the power kinds, a for LogPower, 1 for Exponential.
    double parameter() const noexcept { return param_; }

    /// Power and ShiftedPower satisfy s^-p f(s) -> 1; the others do not.
    bool power_like() const noexcept { return kind_ == Kind::Power || kind_ == Kind::ShiftedPower; }

    double exponent() const
    {
        require(power_like(), ErrorCode::InvalidArgument, name() + " has no power exponent");
        return param_;
    }

    /// All four kinds are convex on [0, inf), LogPower from u >= e at the latest.
    bool convex() const noexcept { return true; }

    ReactionValue eval(double u) const
    {
        if (!(u >= 0.0))
            throw Error(ErrorCode::InvalidArgument, "nonlinearity evaluated at u < 0");
        if (u > kSaturationLevel)
            return saturated();
        double f = 0.0;
        double df = 0.0;
        switch (kind_) {
        case Kind::Power: std::tie(f, df) = power_pair(u); break;
        case Kind::ShiftedPower: std::tie(f, df) = power_pair(1.0 + u); break;
        case Kind::Exponential:
            f = std::exp(u);
            df = f;
            break;
        case Kind::LogPower: {
            const double L = std::log1p(u);
            if (L == 0.0)
                return {0.0, 0.0, false};
            const double La1 = std::pow(L, param_ - 1.0);
            f = u * La1 * L;
            df = La1 * L + param_ * u * La1 / (1.0 + u);
            break;
        }
        }
        if (!std::isfinite(f) || !std::isfinite(df))
            return saturated();
        return {f, df, false};
    }

    double operator()(double u) const { return eval(u).f; }

    /// Monotone decreasing transform of u that is affine in t along the
    /// spatially flat ODE u' = c f(u) near blowup, vanishing as u -> inf.
    /// For Power this is u^(1-p) = u^(-1/alpha).
    double blowup_clock(double u) const
    {
        switch (kind_) {
        case Kind::Power: return std::pow(u, 1.0 - param_);
        case Kind::ShiftedPower: return std::pow(1.0 + u, 1.0 - param_);
        case Kind::Exponential: return std::exp(-u);
        case Kind::LogPower: return std::pow(std::log1p(u), 1.0 - param_);
        }
        return 0.0;
    }

    std::string name() const
    {
        switch (kind_) {
        case Kind::Power: return "power(p=" + trimmed(param_) + ")";
        case Kind::ShiftedPower: return "shifted_power(p=" + trimmed(param_) + ")";
        case Kind::Exponential: return "exponential";
        case Kind::LogPower: return "log_power(a=" + trimmed(param_) + ")";
        }
        return "?";
    }

private:
    Nonlinearity(Kind kind, double param) : kind_(kind), param_(param) {}

    // Integer exponents 2 and 3 avoid pow() in the hot loop.
    std::pair<double, double> power_pair(double s) const
    {
        if (param_ == 2.0)
            return {s * s, 2.0 * s};
        if (param_ == 3.0)
            return {s * s * s, 3.0 * s * s};
        const double sp1 = std::pow(s, param_ - 1.0);
        return {sp1 * s, param_ * sp1};
    }

    static ReactionValue saturated()
    {
        constexpr double big = std::numeric_limits<double>::max();
        return {big, big, true};
    }

    static std::string trimmed(double v)
    {
        std::string s = std::to_string(v);
        while (!s.empty() && s.back() == '0')
            s.pop_back();
        if (!s.empty() && s.back() == '.')
            s.pop_back();
        return s;
    }

    Kind kind_;
    double param_;
};

} // namespace blowup
