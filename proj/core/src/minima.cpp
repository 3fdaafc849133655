#include "mmlab/minima.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mmlab/error.hpp"

namespace mmlab {

double default_tol_val(double min_value) { return 1e-9 * (1.0 + std::abs(min_value)); }

namespace {

struct DisjointSets {
    explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
    std::vector<std::size_t> parent;
};

}  // namespace

MinimaCluster minima_of_values(const GridSpec& grid, std::span<const double> values, Tolerances tol,
                               std::span<const char> mask) {
    if (grid.size() == 0 || values.empty()) fail(ErrorKind::EmptyGrid, "global minima of an empty grid");
    const bool masked = !mask.empty();

    double lowest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (masked && !mask[i]) continue;
        lowest = std::min(lowest, values[i]);
    }
    if (!std::isfinite(lowest)) fail(ErrorKind::EmptyGrid, "global minima: no admissible grid point");

    MinimaCluster out;
    out.value = lowest;
    out.tol_val = tol.tol_val.value_or(default_tol_val(lowest));
    out.tol_sep = tol.tol_sep.value_or(grid.default_tol_sep());
    if (!(out.tol_val > 0.0) || !(out.tol_sep > 0.0)) {
        fail(ErrorKind::InvalidArgument, "global minima: tol_val and tol_sep must be positive");
    }

    for (std::size_t i = 0; i < values.size(); ++i) {
        if (masked && !mask[i]) continue;
        if (values[i] <= lowest + out.tol_val) out.members.push_back(i);
    }

    const std::size_t m = out.members.size();
    std::vector<Point> pts(m);
    for (std::size_t k = 0; k < m; ++k) pts[k] = grid.point(out.members[k]);

    // Single linkage, swept along the first coordinate.
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (pts[a][0] != pts[b][0]) return pts[a][0] < pts[b][0];
        return a < b;
    });
    DisjointSets sets(m);
    for (std::size_t u = 0; u < m; ++u) {
        for (std::size_t v = u; v-- > 0;) {
            if (pts[order[u]][0] - pts[order[v]][0] >= out.tol_sep) break;
            if (distance(pts[order[u]], pts[order[v]]) < out.tol_sep) sets.unite(order[u], order[v]);
        }
    }

    std::vector<std::size_t> rep_of_root(m, m);
    for (std::size_t k = 0; k < m; ++k) {
        const std::size_t r = sets.find(k);
        std::size_t& best = rep_of_root[r];
        if (best == m) {
            best = k;
            continue;
        }
        const double vk = values[out.members[k]];
        const double vb = values[out.members[best]];
        if (vk < vb || (vk == vb && lex_less(pts[k], pts[best]))) best = k;
    }
    std::vector<std::size_t> reps;
    for (std::size_t r = 0; r < m; ++r) {
        if (rep_of_root[r] != m) reps.push_back(rep_of_root[r]);
    }
    std::sort(reps.begin(), reps.end(), [&](std::size_t a, std::size_t b) { return lex_less(pts[a], pts[b]); });
    for (std::size_t k : reps) {
        out.points.push_back(pts[k]);
        out.indices.push_back(out.members[k]);
        out.point_values.push_back(values[out.members[k]]);
    }
    return out;
}

MinimaCluster global_minima(const ScalarField& field, Tolerances tol) {
    return minima_of_values(field.domain(), field.values(), tol);
}

}  // namespace mmlab
