#include "mmlab/field.hpp"

#include <algorithm>
#include <cmath>

#include "mmlab/error.hpp"
#include "mmlab/parallel.hpp"

namespace mmlab {

namespace {

std::string point_text(std::span<const double> p) {
    std::string s = "(";
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) s += ", ";
        s += std::to_string(p[i]);
    }
    return s + ")";
}

}  // namespace

ScalarField ScalarField::from_expression(GridSpec domain, std::string_view text) {
    auto expr = std::make_shared<Expression>(Expression::parse(text, domain.dim()));
    return from_function(std::move(domain), [expr](std::span<const double> x) { return (*expr)(x); },
                         std::string(text));
}

ScalarField ScalarField::from_function(GridSpec domain, Evaluator f, std::string label) {
    ScalarField s;
    s.domain_ = std::make_shared<const GridSpec>(std::move(domain));
    s.eval_ = std::move(f);
    s.label_ = std::move(label);
    s.tabulate();
    return s;
}

ScalarField ScalarField::from_values(GridSpec domain, std::vector<double> values, std::string label) {
    if (values.size() != domain.size()) {
        fail(ErrorKind::Validation, "field: table has " + std::to_string(values.size()) + " values for a grid of " +
                                        std::to_string(domain.size()) + " points");
    }
    ScalarField s;
    s.domain_ = std::make_shared<const GridSpec>(std::move(domain));
    s.values_ = std::move(values);
    s.label_ = std::move(label);
    for (std::size_t i = 0; i < s.values_.size(); ++i) {
        if (!std::isfinite(s.values_[i])) {
            fail(ErrorKind::NonFinite, "field: non-finite value", "at " + point_text(s.domain_->point(i)));
        }
    }
    return s;
}

void ScalarField::tabulate() {
    const GridSpec& g = *domain_;
    values_.assign(g.size(), 0.0);
    const auto bad = parallel_chunks<long long>(g.size(), [&](std::size_t begin, std::size_t end) -> long long {
        Point p(g.dim());
        for (std::size_t i = begin; i < end; ++i) {
            g.point_into(i, p);
            const double v = eval_(p);
            if (!std::isfinite(v)) return static_cast<long long>(i);
            values_[i] = v;
        }
        return -1;
    });
    for (long long i : bad) {
        if (i >= 0) {
            fail(ErrorKind::NonFinite, "field '" + label_ + "': non-finite value",
                 "at " + point_text(g.point(static_cast<std::size_t>(i))));
        }
    }
}

double ScalarField::eval(std::span<const double> x) const {
    if (eval_) return eval_(x);
    return values_[domain_->nearest_index(x)];
}

double ScalarField::min_value() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max_value() const { return *std::max_element(values_.begin(), values_.end()); }

BivariateField BivariateField::from_expression(GridSpec x_domain, GridSpec y_domain, std::string_view text) {
    const std::size_t dx = x_domain.dim();
    const auto expr = Expression::parse(text, dx + y_domain.dim());
    return from_function(std::move(x_domain), std::move(y_domain),
                         [&expr, dx](std::span<const double> x, std::span<const double> y) {
                             double buf[16];
                             std::vector<double> heap;
                             double* z = buf;
                             if (x.size() + y.size() > 16) {
                                 heap.resize(x.size() + y.size());
                                 z = heap.data();
                             }
                             std::copy(x.begin(), x.end(), z);
                             std::copy(y.begin(), y.end(), z + dx);
                             return expr(std::span<const double>(z, x.size() + y.size()));
                         });
}

BivariateField BivariateField::from_function(GridSpec x_domain, GridSpec y_domain, const Evaluator2& f) {
    BivariateField b(std::move(x_domain), std::move(y_domain));
    b.values_.resize(b.nx() * b.ny());
    Point x(b.x_.dim()), y(b.y_.dim());
    for (std::size_t i = 0; i < b.nx(); ++i) {
        b.x_.point_into(i, x);
        for (std::size_t j = 0; j < b.ny(); ++j) {
            b.y_.point_into(j, y);
            b.values_[i * b.ny() + j] = f(x, y);
        }
    }
    b.check_finite();
    return b;
}

BivariateField BivariateField::from_table(GridSpec x_domain, GridSpec y_domain, std::vector<double> values) {
    BivariateField b(std::move(x_domain), std::move(y_domain));
    if (values.size() != b.nx() * b.ny()) {
        fail(ErrorKind::Validation, "bivariate field: table size " + std::to_string(values.size()) +
                                        " does not match " + std::to_string(b.nx()) + " x " + std::to_string(b.ny()));
    }
    b.values_ = std::move(values);
    b.check_finite();
    return b;
}

void BivariateField::check_finite() const {
    for (std::size_t k = 0; k < values_.size(); ++k) {
        if (!std::isfinite(values_[k])) {
            fail(ErrorKind::NonFinite, "bivariate field: non-finite value",
                 "at x=" + point_text(x_.point(k / ny())) + ", y=" + point_text(y_.point(k % ny())));
        }
    }
}

}  // namespace mmlab
