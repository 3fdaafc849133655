#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mmlab/extended_real.hpp"
#include "mmlab/field.hpp"
#include "mmlab/minima.hpp"

namespace mmlab::path {

class MultiplierProblem;

struct InnerResult {
    std::size_t index = 0;  // grid argmin of J + lambda * Phi
    Point point;            // grid argmin, or the polished point near it
    double value = 0.0;     // J + lambda * Phi at `point`
    double J = 0.0;
    double Phi = 0.0;
};

// Replaceable inner solver. It must return the unique global minimum of
// J + lambda * Phi or throw NonUniqueMinimum.
using InnerMinimizer = std::function<InnerResult(const MultiplierProblem&, double lambda)>;

// J and Phi on a shared grid, with the multiplier interval ]a, b[.
class MultiplierProblem {
public:
    MultiplierProblem(ScalarField J, ScalarField Phi, ExtendedReal a, ExtendedReal b, Tolerances tol = {});

    const ScalarField& J() const { return J_; }
    const ScalarField& Phi() const { return Phi_; }
    const GridSpec& domain() const { return J_.domain(); }
    ExtendedReal a() const { return a_; }
    ExtendedReal b() const { return b_; }
    const Tolerances& tol() const { return tol_; }

    // Local Brent refinement of the grid argmin; only used when both fields
    // carry an evaluator and the grid is uniform.
    bool polish() const { return polish_; }
    void set_polish(bool on) { polish_ = on; }
    bool polishing_active() const;

    const InnerMinimizer& minimizer() const { return minimizer_; }
    void set_minimizer(InnerMinimizer m) { minimizer_ = std::move(m); }

    bool contains(double lambda) const;

private:
    ScalarField J_;
    ScalarField Phi_;
    ExtendedReal a_;
    ExtendedReal b_;
    Tolerances tol_;
    bool polish_ = true;
    InnerMinimizer minimizer_;
};

// The built-in inner solver: grid argmin with a uniqueness check, then polish.
InnerResult grid_inner_minimize(const MultiplierProblem& p, double lambda);

InnerResult inner_minimize(const MultiplierProblem& p, double lambda);

struct AlphaBeta {
    ExtendedReal alpha;
    ExtendedReal beta;
    std::optional<MinimaCluster> M_a;
    std::optional<MinimaCluster> M_b;
    bool ordered = true;  // alpha <= beta
};

AlphaBeta alpha_beta(const MultiplierProblem& p);

struct SolveOptions {
    std::optional<double> bisect_tol;  // default 1e-9 * (1 + |r|)
    std::size_t max_iter = 400;
    std::size_t max_expand = 60;
};

struct WellPosedCertificate {
    double r = 0.0;
    double lambda_hat = 0.0;
    Point x_hat;
    std::size_t x_hat_index = 0;
    double J_value = 0.0;
    double phi_value = 0.0;
    double phi_residual = 0.0;
    double residual_tol = 0.0;
    bool unique = true;
    // Multipliers sharing the same grid minimiser (table-backed fields); the
    // reported lambda_hat is the midpoint.
    double lambda_lo = 0.0;
    double lambda_hi = 0.0;
    std::size_t iterations = 0;
    // Cross-check against min { J : |Phi - r| <= band } on the grid.
    double band = 0.0;
    double band_min_J = 0.0;
    double cross_tol = 0.0;
    bool cross_check_passed = false;
    bool dual = false;
};

WellPosedCertificate solve_constrained(const MultiplierProblem& p, double r, const SolveOptions& opts = {});

// Minimise Phi over J^{-1}(r) by swapping the roles of J and Phi.
WellPosedCertificate solve_dual(const MultiplierProblem& p, double r, const SolveOptions& opts = {});

// The problem with J and Phi swapped and multiplier interval ]1/b, 1/a[.
MultiplierProblem dual_problem(const MultiplierProblem& p);

struct MonotonicityReport {
    bool passed = true;
    std::vector<double> lambdas;
    std::vector<double> g;  // Phi(y_lambda)
    std::optional<std::size_t> violation_lo;  // indices into lambdas
    std::optional<std::size_t> violation_hi;
    double tol = 0.0;
};

MonotonicityReport path_monotonicity_check(const MultiplierProblem& p, const std::vector<double>& lambda_grid,
                                           std::optional<double> tol = std::nullopt);

struct LimitReport {
    double limit = 0.0;
    double inf_phi_on_minima = 0.0;  // inf of Phi over the global minima of J
    double difference = 0.0;
    std::vector<double> lambdas;
    std::vector<double> g;
    bool stopped_on_tie = false;  // sequence cut short by a near-tie at tiny lambda
};

// Defaults to lambda_k = 2^-k, k = 1..40. Requires a = 0.
LimitReport limit_inf_phi(const MultiplierProblem& p, std::vector<double> lambda_seq = {});

struct ScanEntry {
    double r = 0.0;
    std::optional<WellPosedCertificate> certificate;
    std::string error_kind;
    std::string error;
};

std::vector<ScanEntry> scan_path(const MultiplierProblem& p, const std::vector<double>& rs,
                                 const SolveOptions& opts = {});

// lambda -> inf_X (J + lambda Phi) on the grid.
double inf_value(const MultiplierProblem& p, double lambda);

}  // namespace mmlab::path
