#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "mmlab/integral.hpp"
#include "mmlab/minimax.hpp"
#include "mmlab/multiplicity.hpp"
#include "mmlab/multiplier_path.hpp"
#include "mmlab/strict_minimax.hpp"

using namespace mmlab;

namespace {

ScalarField field(const char* text, double lo, double hi, std::size_t n) {
    return ScalarField::from_expression(GridSpec::uniform(lo, hi, n), text);
}

void BM_InnerMinimize(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const path::MultiplierProblem p(field("x1^4 - x1", -3.0, 3.0, n), field("x1^2", -3.0, 3.0, n), 0.0,
                                    ExtendedReal::pos_inf());
    double lambda = 0.5;
    for (auto _ : state) {
        benchmark::DoNotOptimize(path::inner_minimize(p, lambda));
        lambda = lambda < 5.0 ? lambda + 0.01 : 0.5;
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n));
}
BENCHMARK(BM_InnerMinimize)->Arg(2001)->Arg(20001)->Arg(200001);

void BM_SolveConstrained(benchmark::State& state) {
    const path::MultiplierProblem p(field("x1", -10.0, 10.0, 200001), field("x1^2", -10.0, 10.0, 200001), 0.0,
                                    ExtendedReal::pos_inf());
    for (auto _ : state) benchmark::DoNotOptimize(path::solve_constrained(p, 1.0));
}
BENCHMARK(BM_SolveConstrained)->Unit(benchmark::kMillisecond);

void BM_ThetaQuadratic(benchmark::State& state) {
    const auto J = field("(x1^2 - 1)^2", -2.0, 2.0, static_cast<std::size_t>(state.range(0)));
    const strict::PointFn id = [](std::span<const double> x) { return Point(x.begin(), x.end()); };
    for (auto _ : state) benchmark::DoNotOptimize(strict::theta_quadratic(J, id));
}
BENCHMARK(BM_ThetaQuadratic)->Arg(201)->Arg(801)->Unit(benchmark::kMillisecond);

void BM_SimplexSupInf(benchmark::State& state) {
    const std::vector<double> c{0.2, 0.3, 0.5};
    const minimax::SimplexFunction f = [&c](std::span<const double>, std::span<const double> lam) {
        double s = 0.0;
        for (std::size_t j = 0; j < 3; ++j) s += (lam[j] - c[j]) * (lam[j] - c[j]);
        return -s;
    };
    const auto x = GridSpec::explicit_points({{0.0}});
    const auto m = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(minimax::simplex_sup_inf(f, x, 3, m));
}
BENCHMARK(BM_SimplexSupInf)->Arg(101)->Arg(1001)->Unit(benchmark::kMillisecond);

void BM_VerifyEq82(benchmark::State& state) {
    const auto phi = field("x1", -10.0, 10.0, 20001);
    const auto psi = field("x1^2", -10.0, 10.0, 20001);
    integral::Eq82Options opts;
    opts.samples = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(integral::verify_eq82(phi, psi, integral::WeightedSpace{{1.0, 1.0, 1.0}, 1.0}, 1.0, opts));
    }
}
BENCHMARK(BM_VerifyEq82)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_ScanRhoStar(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto F = field("-x1^3", -3.0, 3.0, n);
    const auto Phi = field("x1^2", -3.0, 3.0, n);
    std::vector<double> rhos;
    for (int k = 1; k <= 200; ++k) rhos.push_back(0.01 * k);
    for (auto _ : state) benchmark::DoNotOptimize(multiplicity::scan_rho_star(F, Phi, rhos));
}
BENCHMARK(BM_ScanRhoStar)->Arg(6001)->Arg(60001)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
