#include <doctest.h>

#include <cmath>

#include "mmlab/error.hpp"
#include "mmlab/spherical.hpp"

using namespace mmlab;
using namespace mmlab::spherical;

namespace {

SphericalProblem quartic(std::size_t n) {
    return SphericalProblem(ScalarField::from_expression(GridSpec::uniform(0.0, 10.0, n), "2*x1^2 - x1^4"));
}

std::vector<double> r_range(double from, double to, double step) {
    std::vector<double> rs;
    for (int k = 0; from + step * k <= to + 1e-12; ++k) rs.push_back(from + step * k);
    return rs;
}

}  // namespace

TEST_CASE("estimated multiplier interval of the quartic") {
    const auto p = quartic(20001);
    CHECK(p.a() == doctest::Approx(0.0));
    CHECK(p.b().is_finite());
    CHECK(p.b().value() == doctest::Approx(2.0).epsilon(1e-3));
    CHECK_FALSE(p.degenerate());
}

TEST_CASE("g along the path of the quartic") {
    const auto p = quartic(100001);
    const auto rows = trace_g(p, {0.5, 1.0, 1.5, 1.99});
    for (const auto& row : rows) {
        REQUIRE(row.error.empty());
        CHECK(row.g == doctest::Approx((2.0 - row.lambda) / 2.0).epsilon(1e-6));
        CHECK(row.y[0] == doctest::Approx(std::sqrt((2.0 - row.lambda) / 2.0)).epsilon(1e-6));
    }
    CHECK(rows[1].g == doctest::Approx(0.5));
    CHECK(rows[3].g < 0.01);
    for (std::size_t k = 1; k < rows.size(); ++k) CHECK(rows[k].g < rows[k - 1].g);
}

TEST_CASE("gamma and its derivative on the quartic") {
    const auto p = quartic(100001);
    const auto rows = gamma_and_derivative(p, {0.25, 0.5});
    REQUIRE(rows[0].ok());
    REQUIRE(rows[1].ok());
    CHECK(rows[0].gamma == doctest::Approx(0.4375).epsilon(1e-7));
    CHECK(rows[0].gamma_prime == doctest::Approx(1.5).epsilon(1e-4));
    CHECK(rows[0].lambda_hat == doctest::Approx(1.5).epsilon(1e-6));
    CHECK(rows[1].gamma == doctest::Approx(0.75).epsilon(1e-7));
    CHECK(rows[1].gamma_prime == doctest::Approx(1.0).epsilon(1e-4));
    for (const auto& row : rows) {
        CHECK(std::abs(row.gamma - row.sphere_sup) <= 1e-5 * (1.0 + std::abs(row.gamma)));
        CHECK(row.gamma_prime > 0.0);
    }
}

TEST_CASE("all relations hold on the quartic") {
    const auto p = quartic(100001);
    const auto rs = r_range(0.1, 0.9, 0.05);
    const auto rep = verify_relations(p, rs);
    for (const auto& [name, check] : rep.checks) {
        INFO(name << ": " << check.detail);
        CHECK(check.passed);
    }
    CHECK(rep.all_passed());
    REQUIRE(rep.gamma_table.size() == rs.size());
    for (const auto& row : rep.gamma_table) {
        const double r = row.r;
        CHECK(std::abs(row.gamma - (2.0 * r - r * r)) <= 1e-5);
        CHECK(std::abs(row.gamma_prime - row.lambda_hat) <= 5e-4);
        CHECK(row.euler_residual <= 5e-4);
    }
    for (std::size_t k = 1; k < rep.g_table.size(); ++k) CHECK(rep.g_table[k].g < rep.g_table[k - 1].g);
    CHECK(rep.r_star_lo <= rep.r_star_hi);
    CHECK(ExtendedReal(rep.r_star_lo) <= rep.alpha);
}

TEST_CASE("vanishing Psi is degenerate and vacuous") {
    const SphericalProblem p(ScalarField::from_expression(GridSpec::uniform(0.0, 2.0, 201), "0"));
    CHECK(p.degenerate());
    const auto rows = trace_g(p, {0.5, 1.0});
    for (const auto& row : rows) CHECK(row.g == 0.0);
    const auto rep = verify_relations(p, {});
    CHECK(rep.degenerate);
    CHECK(rep.all_passed());
    CHECK(rep.beta == ExtendedReal(0.0));
}

TEST_CASE("symmetric bumps surface a non-unique minimum") {
    SphericalOptions opts;
    opts.a = 0.0;
    opts.b = ExtendedReal(2.0);
    const SphericalProblem p(ScalarField::from_expression(GridSpec::uniform(-3.0, 3.0, 6001), "2*x1^2 - x1^4"), opts);
    const auto rows = trace_g(p, {1.0});
    CHECK_FALSE(rows[0].error.empty());
    const auto gam = gamma_and_derivative(p, {0.5});
    CHECK(gam[0].error_kind == "NonUniqueMinimum");
}

TEST_CASE("two-dimensional fixture against dense sphere sampling") {
    SphericalOptions opts;
    opts.a = 1.0;
    opts.b = ExtendedReal(2.0);
    const auto grid = GridSpec::uniform({0.0, 0.0}, {1.5, 1.5}, {601, 601});
    const SphericalProblem p(ScalarField::from_expression(grid, "2*x1^2 + x2^2 - (x1^2 + x2^2)^2"), opts);
    const auto rows = gamma_and_derivative(p, {0.1, 0.2, 0.3});
    for (const auto& row : rows) {
        INFO("r = " << row.r << " " << row.error);
        REQUIRE(row.ok());
        CHECK(std::abs(row.gamma - row.sphere_sup) <= 1e-5 * (1.0 + std::abs(row.gamma)));
        CHECK(std::abs(row.gamma - (2.0 * row.r - row.r * row.r)) <= 1e-5);
        CHECK(std::abs(row.x_hat[1]) <= 1e-6);
    }
}

TEST_CASE("Psi must vanish at the origin") {
    CHECK_THROWS_AS(SphericalProblem(ScalarField::from_expression(GridSpec::uniform(0.0, 1.0, 11), "x1 + 1")), Error);
}
