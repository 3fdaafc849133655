#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mmlab/extended_real.hpp"
#include "mmlab/field.hpp"
#include "mmlab/minima.hpp"

namespace mmlab::integral {

// Finitely many atoms with positive weights gamma_t, and an exponent p > 0.
struct WeightedSpace {
    std::vector<double> weights;
    double p = 1.0;

    void validate() const;
    double total() const;
};

struct Eq82Options {
    std::size_t samples = 10000;
    std::uint64_t seed = 42;
    // Multiplier interval used for alpha and beta.
    ExtendedReal a = 0.0;
    ExtendedReal b = ExtendedReal::pos_inf();
    Tolerances tol;
};

struct Tuple {
    std::vector<Point> u;  // one point of Y per atom
    double objective = 0.0;  // sum gamma_t phi(u_t)
    double constraint = 0.0;  // sum gamma_t psi(u_t)
};

struct Eq82Report {
    // "holds", "violated", or "identity_not_guaranteed" when phi + lambda psi
    // has several global minima for some multiplier on the path.
    std::string status;
    double r = 0.0;
    ExtendedReal alpha;
    ExtendedReal beta;
    double total_weight = 0.0;
    double pointwise_inf = 0.0;  // inf of phi on psi = r
    double rhs = 0.0;            // pointwise_inf * total_weight
    double band = 0.0;           // |psi - r| <= band used for the grid inf
    double band_inf = 0.0;
    std::optional<double> lambda_hat;
    Tuple achieving;  // constant tuple at the constrained minimiser
    double tol = 0.0;

    std::uint64_t seed = 0;
    std::size_t block_size = 0;  // samples per RNG stream; stream k is seeded from (seed, k)
    std::size_t samples = 0;
    std::size_t accepted = 0;    // feasible as drawn
    std::size_t projected = 0;   // pulled onto the feasible set
    bool projection_used = false;
    std::optional<Tuple> worst;  // smallest objective among samples
    std::size_t violations = 0;

    std::size_t constant_tuples = 0;  // feasible constant tuples checked exhaustively
    std::size_t constant_violations = 0;
    std::optional<Tuple> best_constant;

    std::string hypothesis_error;  // NonUniqueMinimum message, when any
    // Coercivity of phi + lambda psi is automatic on a finite grid; whether the
    // identity needs it in general is left open, so it is only flagged here.
    bool coercivity_unverified = true;

    bool holds() const { return status == "holds"; }
};

// Checks the weighted-sum identity for the constraint sum gamma_t psi(u_t) <= r sum gamma_t.
Eq82Report verify_eq82(const ScalarField& phi, const ScalarField& psi, const WeightedSpace& w, double r,
                       const Eq82Options& opts = {});

struct JensenReport {
    bool holds = false;
    double lhs = 0.0;     // sum gamma_t f(u_t)
    double rhs = 0.0;     // f(p-mean of |u|) * sum gamma_t
    double p_mean = 0.0;
    double tol = 0.0;
    bool equal = false;   // |lhs - rhs| <= tol
};

using RealFn = std::function<double(double)>;

// The hypotheses on f (positivity and smoothness on ]0, inf[, injectivity of
// f'(y) / y^(p-1)) are the caller's responsibility.
JensenReport jensen_check(const RealFn& f, const WeightedSpace& w, const std::vector<double>& u);
// f given as a one-dimensional field with an evaluator.
JensenReport jensen_check(const ScalarField& f, const WeightedSpace& w, const std::vector<double>& u);

// f(y) = log(1 + |y|^p), with the right side written as log(1 + weighted mean of |u|^p).
JensenReport log_inequality_check(const WeightedSpace& w, const std::vector<double>& u);

}  // namespace mmlab::integral
