#include "mmlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mmlab/error.hpp"

namespace mmlab {

bool lex_less(std::span<const double> a, std::span<const double> b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

double distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t d = 0; d < a.size(); ++d) {
        const double t = a[d] - b[d];
        s += t * t;
    }
    return std::sqrt(s);
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    if (n == 0) return {};
    if (n == 1) return {lo};
    std::vector<double> out(n);
    const double width = hi - lo;
    const std::size_t last = n - 1;
    for (std::size_t i = 0; i < n; ++i) {
        if (2 * i == last) {
            out[i] = 0.5 * (lo + hi);
        } else if (2 * i < last) {
            out[i] = lo + width * (static_cast<double>(i) / static_cast<double>(last));
        } else {
            out[i] = hi - width * (static_cast<double>(last - i) / static_cast<double>(last));
        }
    }
    return out;
}

GridSpec GridSpec::uniform(std::vector<double> lo, std::vector<double> hi, std::vector<std::size_t> n) {
    if (lo.empty() || lo.size() != hi.size() || lo.size() != n.size()) {
        fail(ErrorKind::Validation, "grid: lo, hi and n must be non-empty and of equal length");
    }
    for (std::size_t d = 0; d < lo.size(); ++d) {
        if (!std::isfinite(lo[d]) || !std::isfinite(hi[d])) {
            fail(ErrorKind::Validation, "grid: uniform bounds must be finite", "dimension " + std::to_string(d));
        }
        if (!(lo[d] < hi[d])) {
            fail(ErrorKind::Validation, "grid: lo < hi required", "dimension " + std::to_string(d));
        }
        if (n[d] < 2) {
            fail(ErrorKind::Validation, "grid: at least 2 samples per dimension", "dimension " + std::to_string(d));
        }
    }
    GridSpec g;
    g.kind_ = Kind::Uniform;
    g.dim_ = lo.size();
    g.lo_ = std::move(lo);
    g.hi_ = std::move(hi);
    g.n_ = std::move(n);
    g.finish();
    return g;
}

GridSpec GridSpec::uniform(double lo, double hi, std::size_t n) {
    return uniform(std::vector<double>{lo}, std::vector<double>{hi}, std::vector<std::size_t>{n});
}

GridSpec GridSpec::explicit_points(std::vector<Point> points) {
    if (points.empty()) fail(ErrorKind::EmptyGrid, "grid: explicit point list is empty");
    const std::size_t dim = points.front().size();
    if (dim == 0) fail(ErrorKind::Validation, "grid: explicit points must have at least one coordinate");
    for (const auto& p : points) {
        if (p.size() != dim) fail(ErrorKind::Validation, "grid: explicit points have mixed dimensions");
        for (double c : p) {
            if (!std::isfinite(c)) fail(ErrorKind::Validation, "grid: explicit point coordinates must be finite");
        }
    }
    GridSpec g;
    g.kind_ = Kind::Explicit;
    g.dim_ = dim;
    g.points_ = std::move(points);
    g.finish();
    return g;
}

void GridSpec::finish() {
    if (kind_ == Kind::Uniform) {
        axes_.clear();
        size_ = 1;
        spacing_ = 0.0;
        for (std::size_t d = 0; d < dim_; ++d) {
            axes_.push_back(linspace(lo_[d], hi_[d], n_[d]));
            size_ *= n_[d];
            spacing_ = std::max(spacing_, (hi_[d] - lo_[d]) / static_cast<double>(n_[d] - 1));
        }
        return;
    }
    size_ = points_.size();
    lo_.assign(dim_, std::numeric_limits<double>::infinity());
    hi_.assign(dim_, -std::numeric_limits<double>::infinity());
    for (const auto& p : points_) {
        for (std::size_t d = 0; d < dim_; ++d) {
            lo_[d] = std::min(lo_[d], p[d]);
            hi_[d] = std::max(hi_[d], p[d]);
        }
    }
    double closest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points_.size(); ++i) {
        for (std::size_t j = i + 1; j < points_.size(); ++j) {
            const double dist = distance(points_[i], points_[j]);
            if (dist < 1e-12) {
                fail(ErrorKind::Validation, "grid: explicit points must be distinct",
                     "points " + std::to_string(i) + " and " + std::to_string(j));
            }
            closest = std::min(closest, dist);
        }
    }
    spacing_ = std::isfinite(closest) ? closest : 1.0;
}

double GridSpec::default_tol_sep() const {
    return kind_ == Kind::Uniform ? 2.0 * spacing_ : 0.5 * spacing_;
}

Point GridSpec::point(std::size_t i) const {
    Point p(dim_);
    point_into(i, p);
    return p;
}

void GridSpec::point_into(std::size_t i, std::span<double> out) const {
    if (kind_ == Kind::Explicit) {
        std::copy(points_[i].begin(), points_[i].end(), out.begin());
        return;
    }
    for (std::size_t d = dim_; d-- > 0;) {
        out[d] = axes_[d][i % n_[d]];
        i /= n_[d];
    }
}

double GridSpec::coord(std::size_t i, std::size_t d) const {
    if (kind_ == Kind::Explicit) return points_[i][d];
    for (std::size_t k = dim_; k-- > d + 1;) i /= n_[k];
    return axes_[d][i % n_[d]];
}

std::vector<std::size_t> GridSpec::unravel(std::size_t i) const {
    if (kind_ == Kind::Explicit) return {i};
    std::vector<std::size_t> idx(dim_);
    for (std::size_t d = dim_; d-- > 0;) {
        idx[d] = i % n_[d];
        i /= n_[d];
    }
    return idx;
}

std::size_t GridSpec::ravel(std::span<const std::size_t> idx) const {
    if (kind_ == Kind::Explicit) return idx[0];
    std::size_t flat = 0;
    for (std::size_t d = 0; d < dim_; ++d) flat = flat * n_[d] + idx[d];
    return flat;
}

std::vector<std::size_t> GridSpec::neighbors(std::size_t i) const {
    std::vector<std::size_t> out;
    if (kind_ == Kind::Explicit) return out;
    auto idx = unravel(i);
    for (std::size_t d = 0; d < dim_; ++d) {
        if (idx[d] > 0) {
            --idx[d];
            out.push_back(ravel(idx));
            ++idx[d];
        }
        if (idx[d] + 1 < n_[d]) {
            ++idx[d];
            out.push_back(ravel(idx));
            --idx[d];
        }
    }
    return out;
}

std::size_t GridSpec::nearest_index(std::span<const double> x) const {
    if (kind_ == Kind::Explicit) {
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < points_.size(); ++i) {
            const double dd = distance(points_[i], x);
            if (dd < best_d) {
                best_d = dd;
                best = i;
            }
        }
        return best;
    }
    std::vector<std::size_t> idx(dim_);
    for (std::size_t d = 0; d < dim_; ++d) {
        const auto& ax = axes_[d];
        auto it = std::lower_bound(ax.begin(), ax.end(), x[d]);
        std::size_t k = static_cast<std::size_t>(it - ax.begin());
        if (k == ax.size()) {
            k = ax.size() - 1;
        } else if (k > 0 && std::abs(ax[k - 1] - x[d]) <= std::abs(ax[k] - x[d])) {
            --k;
        }
        idx[d] = k;
    }
    return ravel(idx);
}

bool GridSpec::operator==(const GridSpec& o) const {
    return kind_ == o.kind_ && dim_ == o.dim_ && lo_ == o.lo_ && hi_ == o.hi_ && n_ == o.n_ && points_ == o.points_;
}

}  // namespace mmlab
