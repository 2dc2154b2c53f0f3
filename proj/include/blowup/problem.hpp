#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "blowup/domain.hpp"
#include "blowup/error.hpp"
#include "blowup/laplacian.hpp"
#include "blowup/nonlinearity.hpp"
#include "blowup/potential.hpp"

namespace blowup {

struct CriticalConstants {
    double p_S;
    double alpha;
    double kappa;
    bool subcritical;
};

inline CriticalConstants critical_exponents(int n, double p)
{
    require(n >= 1, ErrorCode::InvalidArgument, "dimension must be >= 1");
    require(p > 1.0, ErrorCode::InvalidArgument, "critical exponents need p > 1");
    const double pS = n >= 3 ? (n + 2.0) / (n - 2.0) : std::numeric_limits<double>::infinity();
    const double alpha = 1.0 / (p - 1.0);
    return {pS, alpha, std::pow(alpha, alpha), p < pS};
}

/// One instance of u_t = Lap u + V(x) f(u). Immutable after construction.
class ProblemSpec {
public:
    ProblemSpec(Domain domain, Potential potential, Nonlinearity nonlinearity, std::vector<double> initial_data,
                bool monotone_mode = false)
        : domain_(std::move(domain)), potential_(std::move(potential)), f_(nonlinearity),
          u0_(std::move(initial_data)), monotone_(monotone_mode)
    {
        require(u0_.size() == domain_.size(), ErrorCode::InvalidArgument,
                "initial data has " + std::to_string(u0_.size()) + " values for " +
                    std::to_string(domain_.size()) + " grid points");
        V_ = potential_.sample(domain_.coordinates());
        if (f_.power_like())
            constants_ = critical_exponents(domain_.dimension(), f_.exponent());
    }

    ProblemSpec(Domain domain, Potential potential, Nonlinearity nonlinearity, const Field& initial,
                bool monotone_mode = false)
        : ProblemSpec(domain, std::move(potential), nonlinearity, initial.sample(domain.coordinates()),
                      monotone_mode)
    {
    }

    const Domain& domain() const noexcept { return domain_; }
    const Potential& potential() const noexcept { return potential_; }
    const Nonlinearity& nonlinearity() const noexcept { return f_; }
    const std::vector<double>& initial_data() const noexcept { return u0_; }
    /// V sampled at the grid nodes.
    const std::vector<double>& potential_samples() const noexcept { return V_; }
    bool monotone_mode() const noexcept { return monotone_; }
    const std::optional<CriticalConstants>& constants() const noexcept { return constants_; }

    /// Lap u0 + V f(u0) at every node (0 at Dirichlet nodes).
    std::vector<double> initial_residual() const
    {
        std::vector<double> r = laplacian_apply(u0_, domain_);
        const bool dirichlet = domain_.boundary() == Boundary::DirichletZero;
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (dirichlet && domain_.is_boundary_node(i))
                r[i] = 0.0;
            else
                r[i] += V_[i] * f_(std::max(u0_[i], 0.0));
        }
        return r;
    }

private:
    Domain domain_;
    Potential potential_;
    Nonlinearity f_;
    std::vector<double> u0_;
    std::vector<double> V_;
    bool monotone_;
    std::optional<CriticalConstants> constants_;
};

struct HypothesisCheck {
    enum class Status { Pass, Fail, NotApplicable };
    std::string name;
    Status status = Status::Pass;
    std::vector<std::size_t> offending;
    std::string note;
    double value = std::numeric_limits<double>::quiet_NaN();

    HypothesisCheck() = default;
    explicit HypothesisCheck(std::string n) : name(std::move(n)) {}

    bool passed() const noexcept { return status != Status::Fail; }
};

inline const char* to_string(HypothesisCheck::Status s)
{
    switch (s) {
    case HypothesisCheck::Status::Pass: return "pass";
    case HypothesisCheck::Status::Fail: return "fail";
    case HypothesisCheck::Status::NotApplicable: return "n/a";
    }
    return "?";
}

struct ValidationReport {
    std::vector<HypothesisCheck> checks;

    bool all_passed() const
    {
        return std::all_of(checks.begin(), checks.end(), [](const HypothesisCheck& c) { return c.passed(); });
    }

    const HypothesisCheck* find(const std::string& name) const
    {
        for (const auto& c : checks)
            if (c.name == name)
                return &c;
        return nullptr;
    }
};

namespace detail {

inline HypothesisCheck indices_where(std::string name, std::size_t n, auto&& bad)
{
    HypothesisCheck check{std::move(name)};
    for (std::size_t i = 0; i < n; ++i)
        if (bad(i))
            check.offending.push_back(i);
    if (!check.offending.empty())
        check.status = HypothesisCheck::Status::Fail;
    return check;
}

inline double median(std::vector<double> v)
{
    if (v.empty())
        return 0.0;
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    return *mid;
}

} // namespace detail

/// Negative values above this are treated as roundoff.
inline constexpr double kNegativeSlack = 1e-12;

inline ValidationReport validate_hypotheses(const ProblemSpec& spec)
{
    ValidationReport report;
    const auto& V = spec.potential_samples();
    const auto& u0 = spec.initial_data();
    const auto& dom = spec.domain();
    const auto& f = spec.nonlinearity();
    const std::size_t N = dom.size();

    report.checks.push_back(
        detail::indices_where("potential_nonnegative", N, [&](std::size_t i) { return !(V[i] >= 0.0); }));

    {
        // Bounded successive differences as a continuity heuristic.
        std::vector<double> diffs(N - 1);
        for (std::size_t i = 0; i + 1 < N; ++i)
            diffs[i] = std::abs(V[i + 1] - V[i]);
        const auto [lo, hi] = std::minmax_element(V.begin(), V.end());
        const double bound = std::max(20.0 * detail::median(diffs), 0.05 * (*hi - *lo));
        // A large step of a closed-form V is resampled on 64 sub-cells: a
        // steep but continuous V (|x|^0.5 near 0) spreads the step out, a jump
        // keeps it in one sub-cell.
        const auto& pot = spec.potential();
        const bool refinable = pot.form() != Field::Form::Sampled;
        auto concentrated = [&](std::size_t i) {
            const double a = dom.coordinate(i), b = dom.coordinate(i + 1);
            double prev = pot(a), worst = 0.0;
            for (int k = 1; k <= 64; ++k) {
                const double v = pot(a + (b - a) * k / 64.0);
                worst = std::max(worst, std::abs(v - prev));
                prev = v;
            }
            return !(worst <= 0.5 * diffs[i]);
        };
        auto check = detail::indices_where("potential_continuity", N - 1, [&](std::size_t i) {
            if (!std::isfinite(diffs[i]))
                return true;
            return diffs[i] > bound && (!refinable || concentrated(i));
        });
        check.value = bound;
        check.note = "heuristic: |V[i+1]-V[i]| <= max(20*median, 5% of range), larger steps of a closed-form V "
                     "must spread out under 64x resampling";
        report.checks.push_back(std::move(check));
    }

    report.checks.push_back(detail::indices_where("initial_data_nonnegative", N, [&](std::size_t i) {
        return !(u0[i] >= -kNegativeSlack);
    }));

    {
        double scale = 1.0;
        for (double v : u0)
            scale = std::max(scale, std::abs(v));
        HypothesisCheck check{"boundary_compatibility"};
        if (dom.boundary() == Boundary::DirichletZero) {
            for (std::size_t i = 0; i < N; ++i)
                if (dom.is_boundary_node(i) && std::abs(u0[i]) > 1e-12 * scale)
                    check.offending.push_back(i);
            if (!check.offending.empty())
                check.status = HypothesisCheck::Status::Fail;
        } else {
            check.status = HypothesisCheck::Status::NotApplicable;
            check.note = "Neumann boundary";
        }
        report.checks.push_back(std::move(check));
    }

    {
        HypothesisCheck check{"power_growth"};
        if (f.power_like()) {
            const double s = 1e6;
            check.value = f(s) / std::pow(s, f.exponent());
            if (!(check.value >= 0.9 && check.value <= 1.1))
                check.status = HypothesisCheck::Status::Fail;
            check.note = "s^-p f(s) at s = 1e6";
        } else {
            check.status = HypothesisCheck::Status::NotApplicable;
            check.note = "not power-like; blowup-exclusion and ODE-behaviour predictions do not apply";
        }
        report.checks.push_back(std::move(check));
    }

    {
        HypothesisCheck check{"derivative_growth"};
        if (f.power_like()) {
            // C inferred from a log-spaced sample of |f'(s)| / (1 + s^(p-1)).
            const double p = f.exponent();
            double C = 0.0;
            for (int k = 0; k <= 180; ++k) {
                const double s = std::pow(10.0, -6.0 + 0.1 * k);
                C = std::max(C, std::abs(f.eval(s).df) / (1.0 + std::pow(s, p - 1.0)));
            }
            C = std::max(C, std::abs(f.eval(0.0).df));
            check.value = C;
            if (!std::isfinite(C))
                check.status = HypothesisCheck::Status::Fail;
            check.note = "inferred constant C";
        } else {
            check.status = HypothesisCheck::Status::NotApplicable;
        }
        report.checks.push_back(std::move(check));
    }

    {
        HypothesisCheck check{"monotone_residual"};
        if (spec.monotone_mode()) {
            const auto r = spec.initial_residual();
            for (std::size_t i = 0; i < N; ++i)
                if (!(r[i] >= 0.0))
                    check.offending.push_back(i);
            if (!check.offending.empty())
                check.status = HypothesisCheck::Status::Fail;
            check.value = *std::min_element(r.begin(), r.end());
            check.note = "min of Lap u0 + V f(u0)";
        } else {
            check.status = HypothesisCheck::Status::NotApplicable;
        }
        report.checks.push_back(std::move(check));
    }
    return report;
}

} // namespace blowup
