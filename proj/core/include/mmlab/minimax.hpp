#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mmlab/field.hpp"
#include "mmlab/minima.hpp"

namespace mmlab::minimax {

struct ArgValue {
    double value = 0.0;
    std::size_t index = 0;  // y index for sup_inf, x index for inf_sup
};

// max over y of min over x, exact on the grid.
double sup_inf(const BivariateField& f);
// min over x of max over y, exact on the grid.
double inf_sup(const BivariateField& f);

ArgValue sup_inf_arg(const BivariateField& f);
ArgValue inf_sup_arg(const BivariateField& f);

enum class Alternative { GapClosed, TwoMinima, Inconclusive };
const char* to_string(Alternative a);

// A slice f(., y_hat) with at least two separated global minima. When the
// tie falls strictly between two adjacent y samples (the argmin switches
// between them and both rows are continuous there) y_hat is interpolated from
// the crossing of the two branch values and `interpolated` is set.
struct TwoMinimaWitness {
    std::size_t y_index = 0;
    std::optional<std::size_t> y_next_index;
    Point y_hat;
    bool interpolated = false;
    MinimaCluster minima;
};

// Why neither alternative could be certified from the samples.
struct Diagnostic {
    enum class Kind { QuasiConcavityViolation, Discontinuity, Unresolved };
    Kind kind = Kind::Unresolved;
    std::size_t x_index = 0;
    std::vector<std::size_t> y_indices;  // (y1, y2, y3) or (y_k, y_next)
    std::vector<double> values;
    std::string message;
};
const char* to_string(Diagnostic::Kind k);

struct MinimaxReport {
    double sup_inf = 0.0;
    double inf_sup = 0.0;
    double gap = 0.0;
    double gap_tol = 0.0;
    std::size_t sup_inf_y_index = 0;
    std::size_t inf_sup_x_index = 0;
    Alternative alternative = Alternative::Inconclusive;
    bool gap_closed = false;
    // Filled whenever a two-minima slice exists, also alongside GapClosed.
    std::optional<TwoMinimaWitness> two_minima;
    std::optional<Diagnostic> diagnostic;
};

struct ClassifyOptions {
    std::optional<double> gap_tol;  // default 1e-7 * (1 + |inf_sup|)
    Tolerances tol;                 // per-slice minima extraction
};

MinimaxReport classify_alternative(const BivariateField& f, const ClassifyOptions& opts = {});

// First quasi-concavity violation along y lines, if any.
std::optional<Diagnostic> find_quasi_concavity_violation(const BivariateField& f, double tol_val);
// First jump between adjacent y samples that dwarfs its neighbouring increments.
std::optional<Diagnostic> find_discontinuity(const BivariateField& f);

// f(x, lambda) with lambda on the standard simplex.
using SimplexFunction = std::function<double(std::span<const double> x, std::span<const double> lambda)>;

struct SimplexResult {
    double value = 0.0;
    std::vector<double> lambda;  // maximiser found on the recursion grid
    std::size_t evaluations = 0;
};

// sup over S_n of inf over X, sampling S_n through the recursive map
// (s, mu) -> (mu * s, 1 - mu) from S_{k} x [0,1] onto S_{k+1}, with m samples
// of mu per level.
SimplexResult simplex_sup_inf(const SimplexFunction& f, const GridSpec& x_domain, std::size_t n, std::size_t m);

// The simplex point reached from per-level parameters mu_1..mu_{n-1}.
std::vector<double> simplex_lift(std::span<const double> mus);

// max over members C of sup_C inf_X f, after validating that `cover` covers
// the y grid and is filtering.
double cover_sup_inf(const BivariateField& f, const std::vector<std::vector<std::size_t>>& cover);

void validate_filtering_cover(const std::vector<std::vector<std::size_t>>& cover, std::size_t universe);

}  // namespace mmlab::minimax
