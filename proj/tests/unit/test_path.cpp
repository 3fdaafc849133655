#include <doctest.h>

#include <cmath>
#include <random>

#include "mmlab/error.hpp"
#include "mmlab/multiplier_path.hpp"
#include "oracles.hpp"

using namespace mmlab;
using namespace mmlab::path;

namespace {

MultiplierProblem problem(double lo, double hi, std::size_t n, const char* J, const char* Phi, ExtendedReal a,
                          ExtendedReal b) {
    const auto g = GridSpec::uniform(lo, hi, n);
    return {ScalarField::from_expression(g, J), ScalarField::from_expression(g, Phi), a, b};
}

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::Io;
}

std::vector<double> values(const ScalarField& f) { return {f.values().begin(), f.values().end()}; }

}  // namespace

TEST_CASE("inner minimisation examples") {
    const auto lq = problem(-10, 10, 200001, "x1", "x1^2", 0.0, ExtendedReal::pos_inf());
    const auto r1 = inner_minimize(lq, 0.5);
    CHECK(r1.point[0] == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(r1.value == doctest::Approx(-0.5).epsilon(1e-9));

    const auto quartic = problem(-3, 3, 6001, "x1^4", "x1", ExtendedReal::neg_inf(), ExtendedReal::pos_inf());
    CHECK(inner_minimize(quartic, 4.0).point[0] == doctest::Approx(-1.0).epsilon(1e-7));

    const auto same = problem(-2, 2, 401, "x1^2", "x1^2", 0.0, ExtendedReal::pos_inf());
    const auto r3 = inner_minimize(same, 1.0);
    CHECK(r3.point[0] == doctest::Approx(0.0));
    CHECK(r3.value == doctest::Approx(0.0));

    const auto well = problem(-2, 2, 401, "(x1^2 - 1)^2", "x1^2", 0.0, ExtendedReal::pos_inf());
    CHECK(kind_of([&] { inner_minimize(well, 0.5); }) == ErrorKind::NonUniqueMinimum);
    CHECK(kind_of([&] { inner_minimize(lq, -1.0); }) == ErrorKind::RangeError);
}

TEST_CASE("alpha and beta examples") {
    const auto lq = problem(-10, 10, 2001, "x1", "x1^2", 0.0, ExtendedReal::pos_inf());
    const auto ab = alpha_beta(lq);
    CHECK(ab.alpha == ExtendedReal(0.0));
    CHECK(ab.beta == ExtendedReal(100.0));
    CHECK_FALSE(ab.M_b.has_value());
    REQUIRE(ab.M_a.has_value());
    CHECK(ab.M_a->points[0][0] == -10.0);

    const auto free = problem(-10, 10, 2001, "x1", "x1^2", ExtendedReal::neg_inf(), ExtendedReal::pos_inf());
    const auto ab2 = alpha_beta(free);
    CHECK(ab2.alpha == ExtendedReal(0.0));
    CHECK(ab2.beta == ExtendedReal(100.0));
    CHECK_FALSE(ab2.M_a.has_value());

    const auto well = problem(-2, 2, 2001, "(x1^2 - 1)^2", "x1", 0.0, ExtendedReal::pos_inf());
    const auto ab3 = alpha_beta(well);
    REQUIRE(ab3.M_a.has_value());
    CHECK(ab3.M_a->count() == 2);
    CHECK(ab3.beta.value() == doctest::Approx(-1.0));
    CHECK(ab3.alpha.value() == doctest::Approx(-2.0));
}

TEST_CASE("alpha never exceeds beta on random problems") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const auto g = GridSpec::uniform(-2.0, 2.0, 201);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> J(g.size()), Phi(g.size());
        for (auto& v : J) v = u(rng);
        for (auto& v : Phi) v = u(rng);
        const double a = u(rng), b = a + 0.1 + std::abs(u(rng));
        const MultiplierProblem p(ScalarField::from_values(g, J), ScalarField::from_values(g, Phi), a, b);
        const auto ab = alpha_beta(p);
        CHECK(ab.ordered);
        CHECK(ab.alpha <= ab.beta);
    }
}

TEST_CASE("constrained solve examples") {
    const auto lq = problem(-10, 10, 200001, "x1", "x1^2", 0.0, ExtendedReal::pos_inf());
    const auto c = solve_constrained(lq, 1.0);
    CHECK(c.lambda_hat == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(c.x_hat[0] == doctest::Approx(-1.0).epsilon(1e-8));
    CHECK(c.J_value == doctest::Approx(-1.0).epsilon(1e-8));
    CHECK(c.unique);
    CHECK(c.cross_check_passed);
    CHECK(c.phi_residual <= c.residual_tol);
    CHECK(c.lambda_hat > 0.0);

    const auto quartic = problem(-3, 3, 60001, "x1^4", "x1", ExtendedReal::neg_inf(), ExtendedReal::pos_inf());
    const auto q = solve_constrained(quartic, 2.0);
    CHECK(q.x_hat[0] == doctest::Approx(2.0).epsilon(1e-7));
    CHECK(q.lambda_hat == doctest::Approx(-32.0).epsilon(1e-6));
    CHECK(q.J_value == doctest::Approx(16.0).epsilon(1e-6));

    CHECK(kind_of([&] { solve_constrained(lq, 101.0); }) == ErrorKind::RangeError);
    CHECK(kind_of([&] { solve_constrained(lq, -0.5); }) == ErrorKind::RangeError);
}

TEST_CASE("certificate matches the band-constrained brute force") {
    const auto g = GridSpec::uniform(-3.0, 3.0, 6001);
    for (const auto& [J, Phi] : std::vector<std::pair<const char*, const char*>>{
             {"x1", "x1^2"}, {"x1^4 - x1", "x1^2 + 0.2*x1"}, {"exp(x1) - 2*x1", "x1^2"}}) {
        const MultiplierProblem p(ScalarField::from_expression(g, J), ScalarField::from_expression(g, Phi), 0.0,
                                  ExtendedReal::pos_inf());
        const auto ab = alpha_beta(p);
        for (double r : {0.3, 1.0, 2.5}) {
            if (!(ab.alpha < ExtendedReal(r) && ExtendedReal(r) < ab.beta)) continue;
            const auto c = solve_constrained(p, r);
            const double oracle_min = oracle::band_min(values(p.J()), values(p.Phi()), r, c.band);
            CHECK(std::abs(c.band_min_J - oracle_min) <= 1e-12);
            CHECK(c.cross_check_passed);
            CHECK(std::abs(c.J_value - oracle_min) <= c.cross_tol);
        }
    }
}

TEST_CASE("certificate matches the exact level set when the grid contains it") {
    const auto lq = problem(-10, 10, 200001, "x1", "x1^2", 0.0, ExtendedReal::pos_inf());
    for (double r : {0.25, 1.0, 4.0}) {
        const auto c = solve_constrained(lq, r);
        const double on_level = oracle::band_min(values(lq.J()), values(lq.Phi()), r, 1e-9 * (1.0 + r));
        CHECK(std::abs(c.J_value - on_level) <= 1e-6 * (1.0 + std::abs(c.J_value)));
        CHECK(std::abs(c.lambda_hat - 0.5 / std::sqrt(r)) <= 1e-6);
    }
}

TEST_CASE("path monotonicity") {
    const auto lq = problem(-10, 10, 20001, "x1", "x1^2", 0.0, ExtendedReal::pos_inf());
    std::vector<double> lambdas;
    for (int k = 1; k <= 30; ++k) lambdas.push_back(0.1 * k);
    const auto rep = path_monotonicity_check(lq, lambdas);
    CHECK(rep.passed);
    // Distinct minimisers give a strict decrease.
    for (std::size_t k = 1; k < rep.g.size(); ++k) CHECK(rep.g[k] < rep.g[k - 1]);

    CHECK(path_monotonicity_check(lq, {0.7}).passed);

    auto wrong = lq;
    wrong.set_minimizer([](const MultiplierProblem& p, double lambda) {
        // A stationary point of the wrong sign: Phi grows with lambda.
        const std::size_t i = p.domain().nearest_index(std::vector<double>{-lambda});
        InnerResult r;
        r.index = i;
        r.point = p.domain().point(i);
        r.J = p.J().value(i);
        r.Phi = p.Phi().value(i);
        r.value = r.J + lambda * r.Phi;
        return r;
    });
    const auto bad = path_monotonicity_check(wrong, lambdas);
    CHECK_FALSE(bad.passed);
    REQUIRE(bad.violation_lo.has_value());
    CHECK(*bad.violation_lo < *bad.violation_hi);
}

TEST_CASE("inf value is concave in lambda") {
    const auto p = problem(-2, 2, 4001, "x1^3 - 2*x1", "x1^2 + 1", 0.0, ExtendedReal::pos_inf());
    std::vector<double> v;
    for (int k = 0; k <= 60; ++k) v.push_back(inf_value(p, 0.05 + 0.1 * k));
    for (std::size_t k = 1; k + 1 < v.size(); ++k) CHECK(v[k] >= 0.5 * (v[k - 1] + v[k + 1]) - 1e-12);
}

TEST_CASE("scan is discretely continuous") {
    const auto lq = problem(-10, 10, 20001, "x1", "x1^2", 0.0, ExtendedReal::pos_inf());
    std::vector<double> rs;
    for (int k = 0; k < 40; ++k) rs.push_back(0.5 + 0.05 * k);
    const auto scan = scan_path(lq, rs);
    for (std::size_t k = 0; k < scan.size(); ++k) {
        REQUIRE(scan[k].certificate.has_value());
        if (k == 0) continue;
        const double dJ = std::abs(scan[k].certificate->J_value - scan[k - 1].certificate->J_value);
        // J = -sqrt(r) has slope at most 1/(2 sqrt(0.5)) on this range.
        CHECK(dJ <= 0.05 * 0.75 + 1e-3);
    }
    const auto outside = scan_path(lq, {200.0});
    CHECK(outside[0].error_kind == "RangeError");
}

TEST_CASE("dual problem") {
    const auto p = problem(-10, 10, 20001, "x1^2", "x1", 0.0, ExtendedReal::pos_inf());
    const auto c = solve_dual(p, 4.0);
    CHECK(c.x_hat[0] == doctest::Approx(-2.0).epsilon(1e-6));
    CHECK(c.dual);

    const auto neg = problem(-10, 10, 2001, "x1^2", "x1", -1.0, ExtendedReal::pos_inf());
    CHECK(kind_of([&] { solve_dual(neg, 4.0); }) == ErrorKind::DomainError);

    // With J = Phi every J + lambda Phi (lambda > 0) shares the minimiser of J,
    // so no interior level is reachable and ]gamma, delta[ is empty.
    const auto same = problem(0, 3, 3001, "x1^2", "x1^2", 0.0, ExtendedReal::pos_inf());
    CHECK(kind_of([&] { solve_dual(same, 2.0); }) == ErrorKind::RangeError);
}

TEST_CASE("limit of Phi along a vanishing multiplier") {
    const auto well = problem(-2, 2, 4001, "(x1^2 - 1)^2", "x1", 0.0, ExtendedReal::pos_inf());
    const auto lim = limit_inf_phi(well);
    CHECK(lim.limit == doctest::Approx(-1.0).epsilon(1e-3));
    CHECK(lim.inf_phi_on_minima == doctest::Approx(-1.0));

    const auto sq = problem(-2, 2, 401, "x1^2", "x1^2", 0.0, ExtendedReal::pos_inf());
    CHECK(limit_inf_phi(sq).limit == doctest::Approx(0.0));

    const auto lq = problem(-10, 10, 2001, "x1", "x1^2", 0.0, ExtendedReal::pos_inf());
    CHECK(kind_of([&] { limit_inf_phi(lq); }) == ErrorKind::HypothesisViolation);
}

TEST_CASE("problem validation") {
    const auto g = GridSpec::uniform(0.0, 1.0, 11);
    const auto h = GridSpec::uniform(0.0, 1.0, 12);
    CHECK_THROWS_AS(MultiplierProblem(ScalarField::from_expression(g, "x1"), ScalarField::from_expression(h, "x1"), 0.0,
                                      1.0),
                    Error);
    CHECK_THROWS_AS(MultiplierProblem(ScalarField::from_expression(g, "x1"), ScalarField::from_expression(g, "x1"), 1.0,
                                      1.0),
                    Error);
}
