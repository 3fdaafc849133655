#include <doctest.h>

#include <cmath>

#include "mmlab/error.hpp"
#include "mmlab/strict_minimax.hpp"
#include "oracles.hpp"

using namespace mmlab;
using namespace mmlab::strict;

namespace {

Point identity(std::span<const double> x) { return {x.begin(), x.end()}; }

// The quadratic instantiation written out by hand.
ThetaProblem explicit_problem(ScalarField J) {
    ThetaProblem p{std::move(J),
                   [](std::span<const double> y) { return y[0] * y[0]; },
                   [](std::span<const double> x, std::span<const double> lam) { return Point{x[0] - lam[0]}; },
                   [](std::span<const double> x) { return Point{x[0]}; },
                   Point{0.0},
                   {}};
    return p;
}

ScalarField field(const char* text, double lo = -2.0, double hi = 2.0, std::size_t n = 401) {
    return ScalarField::from_expression(GridSpec::uniform(lo, hi, n), text);
}

std::vector<double> xs_of(const ScalarField& f) {
    std::vector<double> xs;
    for (std::size_t i = 0; i < f.size(); ++i) xs.push_back(f.domain().point(i)[0]);
    return xs;
}

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::Io;
}

// u in M_J iff u minimises x -> J(x) - theta (x - u)^2 on the grid.
bool minimality_invariant_holds(const ScalarField& J, double th, const MinimaCluster& mj) {
    const auto xs = xs_of(J);
    for (std::size_t u = 0; u < xs.size(); ++u) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t x = 0; x < xs.size(); ++x) {
            best = std::min(best, J.value(x) - th * (xs[x] - xs[u]) * (xs[x] - xs[u]));
        }
        const bool is_min = J.value(u) <= best + mj.tol_val;
        const bool in_mj = std::binary_search(mj.members.begin(), mj.members.end(), u);
        if (is_min != in_mj) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("theta examples") {
    const auto well = theta(explicit_problem(field("(x1^2 - 1)^2")));
    CHECK(well.theta.value() == doctest::Approx(0.0));
    const auto sq = theta(explicit_problem(field("x1^2")));
    CHECK(std::abs(sq.theta.value() - 1.0) <= 1e-9);
    const auto flat = theta(explicit_problem(field("3")));
    CHECK(flat.theta.value() == 0.0);
}

TEST_CASE("theta_quadratic equals theta on the explicit instantiation") {
    for (const char* text : {"(x1^2 - 1)^2", "x1^2", "3*x1^2 + x1^4", "abs(x1) + x1^3/10", "exp(x1) - x1"}) {
        const auto J = field(text);
        const auto a = theta(explicit_problem(J));
        const auto b = theta_quadratic(J, identity);
        CHECK(a.theta == b.theta);
        CHECK(a.u_index == b.u_index);
        CHECK(a.x_index == b.x_index);
    }
}

TEST_CASE("theta against the pair-enumeration oracle") {
    for (const char* text : {"3*x1^2 + x1^4", "x1^2 - x1^3/4", "(x1 - 0.5)^2 * (2 + x1)", "abs(x1 - 0.3)"}) {
        const auto J = field(text, -1.5, 1.5, 301);
        const auto t = theta_quadratic(J, identity);
        const double expect = oracle::theta_pairs(xs_of(J), {J.values().begin(), J.values().end()}, t.minima.tol_val);
        CHECK(t.theta.value() == doctest::Approx(expect).epsilon(1e-12));
    }
    const auto J = field("3*x1^2 + x1^4", -2.0, 2.0, 401);
    CHECK(theta_quadratic(J, identity).theta.value() >= 3.0);
}

TEST_CASE("minimality and multiplier invariants on the fixtures") {
    for (const char* text : {"(x1^2 - 1)^2", "x1^2", "3*x1^2 + x1^4", "(x1^2 - 1)^2 + 0.1*x1"}) {
        const auto J = field(text);
        const auto t = theta_quadratic(J, identity);
        CHECK(minimality_invariant_holds(J, t.theta.value(), t.minima));
        if (t.theta.value() > 0.0) {
            for (std::size_t u : t.minima.members) CHECK(J.domain().point(u)[0] == J.domain().point(t.minima.members[0])[0]);
        }
    }
}

TEST_CASE("strict gap witness") {
    const auto well = explicit_problem(field("(x1^2 - 1)^2", -2.0, 2.0, 201));
    const auto w = strict_gap_witness(well, 1.0, whole_cover(well.J.size()));
    CHECK(w.sides.lhs < w.sides.rhs);
    CHECK(w.sides.rhs == doctest::Approx(0.0));

    const auto sq = explicit_problem(field("x1^2", -2.0, 2.0, 201));
    const auto w2 = strict_gap_witness(sq, 1.5, whole_cover(sq.J.size()));
    CHECK(w2.sides.rhs - w2.sides.lhs > 0.0);

    CHECK(kind_of([&] { strict_gap_witness(sq, 0.5, whole_cover(sq.J.size())); }) == ErrorKind::InvalidArgument);

    Cover singletons;
    for (std::size_t i = 0; i < sq.J.size(); ++i) singletons.push_back({i});
    CHECK(kind_of([&] { strict_gap_witness(well, 1.0, singletons); }) == ErrorKind::Validation);
}

TEST_CASE("weakly filtering covers") {
    CHECK_NOTHROW(validate_weakly_filtering({{0, 1}, {1, 2}, {0, 2}}, 3));
    CHECK_THROWS_AS(validate_weakly_filtering({{0, 1}, {1, 2}}, 3), Error);
}

TEST_CASE("lower bound check is consistent with theta") {
    const auto sq = explicit_problem(field("x1^2", -2.0, 2.0, 201));
    const auto cover = whole_cover(sq.J.size());
    CHECK(check_theta_lower_bound(sq, 0.5, cover).holds);
    CHECK_FALSE(check_theta_lower_bound(sq, 2.0, cover).holds);
    const auto flat = explicit_problem(field("3", -2.0, 2.0, 201));
    CHECK_FALSE(check_theta_lower_bound(flat, 1.0, cover).holds);
}

TEST_CASE("theta problem validation") {
    auto bad = explicit_problem(field("x1^2"));
    bad.lambda_map = [](std::span<const double>) { return Point{0.0}; };
    CHECK_THROWS_AS(bad.validate(), Error);
    auto shifted = explicit_problem(field("x1^2"));
    shifted.phi = [](std::span<const double> y) { return y[0] * y[0] + 1.0; };
    CHECK_THROWS_AS(shifted.validate(), Error);
}
