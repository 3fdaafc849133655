#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mmlab {

using Point = std::vector<double>;

// Lexicographic order on coordinates; used for deterministic tie-breaking.
bool lex_less(std::span<const double> a, std::span<const double> b);

double distance(std::span<const double> a, std::span<const double> b);

// Finite sampling of a box (tensor-product uniform grid) or an explicit point
// list. Uniform grids enumerate points with the last coordinate fastest, so
// flat index order coincides with lexicographic coordinate order.
class GridSpec {
public:
    enum class Kind { Uniform, Explicit };

    static GridSpec uniform(std::vector<double> lo, std::vector<double> hi, std::vector<std::size_t> n);
    static GridSpec uniform(double lo, double hi, std::size_t n);
    static GridSpec explicit_points(std::vector<Point> points);

    Kind kind() const { return kind_; }
    std::size_t dim() const { return dim_; }
    std::size_t size() const { return size_; }

    const std::vector<double>& lo() const { return lo_; }
    const std::vector<double>& hi() const { return hi_; }
    const std::vector<std::size_t>& counts() const { return n_; }
    const std::vector<Point>& explicit_list() const { return points_; }

    // Per-axis coordinates of a uniform grid. Symmetric boxes produce exactly
    // symmetric coordinates, and an odd count hits the midpoint exactly.
    const std::vector<double>& axis(std::size_t d) const { return axes_[d]; }

    Point point(std::size_t i) const;
    void point_into(std::size_t i, std::span<double> out) const;
    double coord(std::size_t i, std::size_t d) const;

    // Largest per-axis spacing (uniform) or smallest pairwise distance (explicit).
    double spacing() const { return spacing_; }
    // Merge radius for minima clusters: 2 * spacing for uniform grids, half the
    // closest pair distance for explicit lists (all listed points stay distinct).
    double default_tol_sep() const;

    std::vector<std::size_t> unravel(std::size_t i) const;
    std::size_t ravel(std::span<const std::size_t> idx) const;

    // Axis-adjacent grid neighbours (empty for explicit lists).
    std::vector<std::size_t> neighbors(std::size_t i) const;

    std::size_t nearest_index(std::span<const double> x) const;

    bool operator==(const GridSpec& o) const;

private:
    GridSpec() = default;
    void finish();

    Kind kind_ = Kind::Uniform;
    std::size_t dim_ = 0;
    std::size_t size_ = 0;
    std::vector<double> lo_, hi_;
    std::vector<std::size_t> n_;
    std::vector<std::vector<double>> axes_;
    std::vector<Point> points_;
    double spacing_ = 0.0;
};

// Uniform 1-D sample of [lo, hi] with n points, built the same way as grid axes.
std::vector<double> linspace(double lo, double hi, std::size_t n);

}  // namespace mmlab
