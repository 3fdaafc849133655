#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mmlab/expr.hpp"
#include "mmlab/grid.hpp"

namespace mmlab {

using Evaluator = std::function<double(std::span<const double>)>;

// A real function tabulated on a grid. Fields built from an expression or a
// callable keep it, so off-grid evaluation (finite differences, local polish)
// is available; table-backed fields fall back to the nearest grid value.
class ScalarField {
public:
    static ScalarField from_expression(GridSpec domain, std::string_view text);
    static ScalarField from_function(GridSpec domain, Evaluator f, std::string label = "function");
    static ScalarField from_values(GridSpec domain, std::vector<double> values, std::string label = "table");

    const GridSpec& domain() const { return *domain_; }
    std::span<const double> values() const { return values_; }
    double value(std::size_t i) const { return values_[i]; }
    std::size_t size() const { return values_.size(); }

    bool has_evaluator() const { return static_cast<bool>(eval_); }
    double eval(std::span<const double> x) const;
    const std::string& label() const { return label_; }

    double min_value() const;
    double max_value() const;

private:
    ScalarField() = default;
    void tabulate();

    std::shared_ptr<const GridSpec> domain_;
    std::vector<double> values_;
    Evaluator eval_;
    std::string label_;
};

// f(x, y) on the product of two grids, stored row-major by x. In expressions
// x occupies x1..xk and y continues as x(k+1)..x(k+m).
class BivariateField {
public:
    using Evaluator2 = std::function<double(std::span<const double> x, std::span<const double> y)>;

    static BivariateField from_expression(GridSpec x_domain, GridSpec y_domain, std::string_view text);
    static BivariateField from_function(GridSpec x_domain, GridSpec y_domain, const Evaluator2& f);
    static BivariateField from_table(GridSpec x_domain, GridSpec y_domain, std::vector<double> values);

    const GridSpec& x_domain() const { return x_; }
    const GridSpec& y_domain() const { return y_; }
    std::size_t nx() const { return x_.size(); }
    std::size_t ny() const { return y_.size(); }
    double at(std::size_t ix, std::size_t iy) const { return values_[ix * y_.size() + iy]; }
    std::span<const double> row(std::size_t ix) const { return {values_.data() + ix * y_.size(), y_.size()}; }
    std::span<const double> values() const { return values_; }

private:
    BivariateField(GridSpec x, GridSpec y) : x_(std::move(x)), y_(std::move(y)) {}
    void check_finite() const;

    GridSpec x_;
    GridSpec y_;
    std::vector<double> values_;
};

}  // namespace mmlab
