#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "blowup/csv.hpp"
#include "blowup/error.hpp"
#include "blowup/expression.hpp"

namespace blowup {

/// Scalar function of the spatial coordinate (x on an interval, r on a
/// radial domain). Used for V(x) and for initial data.
class Field {
public:
    enum class Form { Constant, PowerOfRadius, Sampled, Expression };

    static Field constant(double c) { return Field(Form::Constant, c); }

    /// |x|^sigma
    static Field power_of_radius(double sigma)
    {
        require(sigma > 0.0, ErrorCode::InvalidArgument, "power of radius needs sigma > 0");
        return Field(Form::PowerOfRadius, sigma);
    }

    /// Piecewise-linear interpolant of (xs, values); constant beyond the ends.
    static Field sampled(std::vector<double> xs, std::vector<double> values)
    {
        require(xs.size() == values.size() && xs.size() >= 2, ErrorCode::InvalidArgument,
                "sampled field needs matching x/value arrays of length >= 2");
        for (std::size_t i = 1; i < xs.size(); ++i)
            require(xs[i] > xs[i - 1], ErrorCode::InvalidArgument, "sampled field x must be increasing");
        Field field(Form::Sampled, 0.0);
        field.samples_ = std::make_shared<const Samples>(Samples{std::move(xs), std::move(values)});
        return field;
    }

    static Field from_csv(const std::filesystem::path& path)
    {
        auto [xs, values] = csv::read_two_column(path);
        Field field = sampled(std::move(xs), std::move(values));
        field.source_ = path.string();
        return field;
    }

    static Field expression(const std::string& text)
    {
        Field field(Form::Expression, 0.0);
        field.expr_ = std::make_shared<const Expression>(text);
        return field;
    }

    Form form() const noexcept { return form_; }

    double operator()(double x) const
    {
        switch (form_) {
        case Form::Constant: return value_;
        case Form::PowerOfRadius: return std::pow(std::abs(x), value_);
        case Form::Sampled: return interpolate(x);
        case Form::Expression: return (*expr_)(x);
        }
        return 0.0;
    }

    std::vector<double> sample(const std::vector<double>& xs) const
    {
        std::vector<double> out(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i)
            out[i] = (*this)(xs[i]);
        return out;
    }

    std::string describe() const
    {
        switch (form_) {
        case Form::Constant: return "constant(" + csv::format(value_) + ")";
        case Form::PowerOfRadius: return "|x|^" + csv::format(value_);
        case Form::Sampled:
            return source_.empty() ? "sampled(" + std::to_string(samples_->xs.size()) + " points)"
                                   : "sampled(" + source_ + ")";
        case Form::Expression: return expr_->source();
        }
        return "?";
    }

private:
    struct Samples {
        std::vector<double> xs;
        std::vector<double> values;
    };

    Field(Form form, double value) : form_(form), value_(value) {}

    double interpolate(double x) const
    {
        const auto& xs = samples_->xs;
        const auto& vs = samples_->values;
        if (x <= xs.front())
            return vs.front();
        if (x >= xs.back())
            return vs.back();
        const auto it = std::upper_bound(xs.begin(), xs.end(), x);
        const std::size_t j = static_cast<std::size_t>(it - xs.begin());
        const double w = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
        return vs[j - 1] + w * (vs[j] - vs[j - 1]);
    }

    Form form_;
    double value_;
    std::shared_ptr<const Samples> samples_;
    std::shared_ptr<const Expression> expr_;
    std::string source_;
};

using Potential = Field;

} // namespace blowup
