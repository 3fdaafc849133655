#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "mmlab/field.hpp"
#include "mmlab/grid.hpp"

namespace mmlab {

struct Tolerances {
    std::optional<double> tol_val;  // default 1e-9 * (1 + |min|)
    std::optional<double> tol_sep;  // default GridSpec::default_tol_sep()
};

double default_tol_val(double min_value);

// The epsilon-realisation of "the set of all global minima": every grid point
// within tol_val of the grid minimum, grouped by single linkage at distance
// tol_sep. Each group is reported through one representative (least value,
// then lexicographically smallest), listed in lexicographic order.
struct MinimaCluster {
    std::vector<Point> points;
    std::vector<std::size_t> indices;
    std::vector<double> point_values;
    std::vector<std::size_t> members;  // all near-minimal grid indices, ascending
    double value = 0.0;
    double tol_val = 0.0;
    double tol_sep = 0.0;

    std::size_t count() const { return points.size(); }
    bool unique() const { return points.size() == 1; }
};

MinimaCluster global_minima(const ScalarField& field, Tolerances tol = {});

// Same extraction on raw values over `grid`, optionally restricted to the
// indices where mask[i] != 0. Throws EmptyGrid when nothing is admissible.
MinimaCluster minima_of_values(const GridSpec& grid, std::span<const double> values, Tolerances tol = {},
                               std::span<const char> mask = {});

}  // namespace mmlab
