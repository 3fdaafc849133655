#include "mmlab/minimax.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "mmlab/error.hpp"
#include "mmlab/parallel.hpp"

namespace mmlab::minimax {

namespace {

void require_nonempty(const BivariateField& f) {
    if (f.nx() == 0 || f.ny() == 0) fail(ErrorKind::EmptyGrid, "minimax: empty product grid");
}

std::vector<double> column(const BivariateField& f, std::size_t iy) {
    std::vector<double> c(f.nx());
    for (std::size_t ix = 0; ix < f.nx(); ++ix) c[ix] = f.at(ix, iy);
    return c;
}

// Adjacent pairs (k, k2) with k < k2 along the last axis of a uniform y grid,
// or consecutive entries of an explicit list. `step` is the flat stride.
struct Line {
    std::size_t start;
    std::size_t step;
    std::size_t len;
};

std::vector<Line> y_lines(const GridSpec& y) {
    std::vector<Line> lines;
    if (y.kind() == GridSpec::Kind::Explicit) {
        lines.push_back({0, 1, y.size()});
        return lines;
    }
    // Lines along every axis: for axis d the stride is the product of later counts.
    const auto& n = y.counts();
    for (std::size_t d = y.dim(); d-- > 0;) {
        std::size_t stride = 1;
        for (std::size_t e = d + 1; e < n.size(); ++e) stride *= n[e];
        for (std::size_t i = 0; i < y.size(); ++i) {
            if ((i / stride) % n[d] == 0) lines.push_back({i, stride, n[d]});
        }
    }
    return lines;
}

bool is_jump(std::span<const double> row, const Line& line, std::size_t k, double* jump_out = nullptr) {
    // k is the position along the line; compares (k, k+1) with its neighbours.
    auto v = [&](std::size_t t) { return row[line.start + t * line.step]; };
    const double jump = std::abs(v(k + 1) - v(k));
    double ref = -1.0;
    if (k > 0) ref = std::max(ref, std::abs(v(k) - v(k - 1)));
    if (k + 2 < line.len) ref = std::max(ref, std::abs(v(k + 2) - v(k + 1)));
    if (jump_out) *jump_out = jump;
    if (ref < 0.0) return false;
    return jump > 10.0 * ref + 1e-12 * (1.0 + std::abs(v(k)) + std::abs(v(k + 1)));
}

std::size_t argmin_of(std::span<const double> v) {
    return static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
}

// simplex_lift on grid indices without allocating.
void lift_into(const std::vector<std::size_t>& idx, const std::vector<double>& mu_grid, std::vector<double>& lam) {
    double prod = 1.0;
    for (std::size_t l = idx.size(); l-- > 0;) {
        const double mu = mu_grid[idx[l]];
        lam[l + 1] = prod * (1.0 - mu);
        prod *= mu;
    }
    lam[0] = prod;
}

}  // namespace

const char* to_string(Alternative a) {
    switch (a) {
        case Alternative::GapClosed: return "GapClosed";
        case Alternative::TwoMinima: return "TwoMinima";
        case Alternative::Inconclusive: return "Inconclusive";
    }
    return "?";
}

const char* to_string(Diagnostic::Kind k) {
    switch (k) {
        case Diagnostic::Kind::QuasiConcavityViolation: return "quasi_concavity_violation";
        case Diagnostic::Kind::Discontinuity: return "discontinuity";
        case Diagnostic::Kind::Unresolved: return "unresolved";
    }
    return "?";
}

ArgValue sup_inf_arg(const BivariateField& f) {
    require_nonempty(f);
    std::vector<double> colmin(f.ny(), std::numeric_limits<double>::infinity());
    for (std::size_t ix = 0; ix < f.nx(); ++ix) {
        const auto r = f.row(ix);
        for (std::size_t iy = 0; iy < f.ny(); ++iy) colmin[iy] = std::min(colmin[iy], r[iy]);
    }
    const auto it = std::max_element(colmin.begin(), colmin.end());
    return {*it, static_cast<std::size_t>(it - colmin.begin())};
}

ArgValue inf_sup_arg(const BivariateField& f) {
    require_nonempty(f);
    const auto maxima = parallel_chunks<std::pair<double, std::size_t>>(
        f.nx(), [&](std::size_t begin, std::size_t end) {
            std::pair<double, std::size_t> best{std::numeric_limits<double>::infinity(), begin};
            for (std::size_t ix = begin; ix < end; ++ix) {
                const auto r = f.row(ix);
                const double m = *std::max_element(r.begin(), r.end());
                if (m < best.first) best = {m, ix};
            }
            return best;
        });
    std::pair<double, std::size_t> best{std::numeric_limits<double>::infinity(), 0};
    for (const auto& c : maxima) {
        if (c.first < best.first) best = c;
    }
    return {best.first, best.second};
}

double sup_inf(const BivariateField& f) { return sup_inf_arg(f).value; }
double inf_sup(const BivariateField& f) { return inf_sup_arg(f).value; }

std::optional<Diagnostic> find_quasi_concavity_violation(const BivariateField& f, double tol_val) {
    const auto lines = y_lines(f.y_domain());
    for (std::size_t ix = 0; ix < f.nx(); ++ix) {
        const auto row = f.row(ix);
        for (const Line& line : lines) {
            if (line.len < 3) continue;
            auto v = [&](std::size_t t) { return row[line.start + t * line.step]; };
            // prefix[t] = argmax over [0, t), suffix[t] = argmax over (t, len)
            std::vector<std::size_t> prefix(line.len), suffix(line.len);
            prefix[1] = 0;
            for (std::size_t t = 2; t < line.len; ++t) {
                prefix[t] = v(t - 1) > v(prefix[t - 1]) ? t - 1 : prefix[t - 1];
            }
            suffix[line.len - 2] = line.len - 1;
            for (std::size_t t = line.len - 2; t-- > 0;) {
                suffix[t] = v(t + 1) >= v(suffix[t + 1]) ? t + 1 : suffix[t + 1];
            }
            for (std::size_t t = 1; t + 1 < line.len; ++t) {
                const double lo = std::min(v(prefix[t]), v(suffix[t]));
                if (v(t) < lo - tol_val) {
                    Diagnostic d;
                    d.kind = Diagnostic::Kind::QuasiConcavityViolation;
                    d.x_index = ix;
                    d.y_indices = {line.start + prefix[t] * line.step, line.start + t * line.step,
                                   line.start + suffix[t] * line.step};
                    d.values = {v(prefix[t]), v(t), v(suffix[t])};
                    d.message = "f(x, .) dips below both sides along a y line: not quasi-concave";
                    return d;
                }
            }
        }
    }
    return std::nullopt;
}

std::optional<Diagnostic> find_discontinuity(const BivariateField& f) {
    const auto lines = y_lines(f.y_domain());
    for (std::size_t ix = 0; ix < f.nx(); ++ix) {
        const auto row = f.row(ix);
        for (const Line& line : lines) {
            for (std::size_t t = 0; t + 1 < line.len; ++t) {
                double jump = 0.0;
                if (!is_jump(row, line, t, &jump)) continue;
                Diagnostic d;
                d.kind = Diagnostic::Kind::Discontinuity;
                d.x_index = ix;
                const std::size_t k = line.start + t * line.step;
                d.y_indices = {k, k + line.step};
                d.values = {row[k], row[k + line.step]};
                d.message = "f(x, .) jumps between adjacent y samples: continuity in y fails";
                return d;
            }
        }
    }
    return std::nullopt;
}

namespace {

std::optional<TwoMinimaWitness> exact_two_minima(const BivariateField& f, const Tolerances& tol) {
    for (std::size_t iy = 0; iy < f.ny(); ++iy) {
        const auto c = column(f, iy);
        MinimaCluster m = minima_of_values(f.x_domain(), c, tol);
        if (m.count() >= 2) {
            TwoMinimaWitness w;
            w.y_index = iy;
            w.y_hat = f.y_domain().point(iy);
            w.minima = std::move(m);
            return w;
        }
    }
    return std::nullopt;
}

// Leadership switch between two adjacent y samples whose rows are continuous
// there: the tie lies strictly between the samples.
std::optional<TwoMinimaWitness> interpolated_two_minima(const BivariateField& f, const Tolerances& tol) {
    const GridSpec& xg = f.x_domain();
    const GridSpec& yg = f.y_domain();
    const double tol_sep = tol.tol_sep.value_or(xg.default_tol_sep());
    std::optional<TwoMinimaWitness> best;
    for (const Line& line : y_lines(yg)) {
        for (std::size_t t = 0; t + 1 < line.len; ++t) {
            const std::size_t k0 = line.start + t * line.step;
            const std::size_t k1 = k0 + line.step;
            if (best && best->y_index <= k0) break;
            const auto c0 = column(f, k0);
            const auto c1 = column(f, k1);
            const std::size_t a = argmin_of(c0);
            const std::size_t b = argmin_of(c1);
            if (a == b || distance(xg.point(a), xg.point(b)) < tol_sep) continue;
            if (is_jump(f.row(a), line, t) || is_jump(f.row(b), line, t)) continue;
            // d(y) = f(a, y) - f(b, y) goes from <= 0 to >= 0.
            const double d0 = c0[a] - c0[b];
            const double d1 = c1[a] - c1[b];
            if (!(d0 < 0.0 && d1 > 0.0)) continue;
            const double s = d0 / (d0 - d1);
            TwoMinimaWitness w;
            w.y_index = k0;
            w.y_next_index = k1;
            w.interpolated = true;
            const Point y0 = yg.point(k0), y1 = yg.point(k1);
            w.y_hat.resize(y0.size());
            for (std::size_t i = 0; i < y0.size(); ++i) w.y_hat[i] = y0[i] + s * (y1[i] - y0[i]);
            const double va = c0[a] + s * (c1[a] - c0[a]);
            const double vb = c0[b] + s * (c1[b] - c0[b]);
            MinimaCluster& m = w.minima;
            m.value = std::min(va, vb);
            m.tol_val = std::max(tol.tol_val.value_or(default_tol_val(m.value)), std::abs(va - vb));
            m.tol_sep = tol_sep;
            std::vector<std::pair<Point, std::pair<std::size_t, double>>> pts = {{xg.point(a), {a, va}},
                                                                                 {xg.point(b), {b, vb}}};
            std::sort(pts.begin(), pts.end(), [](const auto& p, const auto& q) { return lex_less(p.first, q.first); });
            for (auto& p : pts) {
                m.points.push_back(p.first);
                m.indices.push_back(p.second.first);
                m.point_values.push_back(p.second.second);
            }
            m.members = {std::min(a, b), std::max(a, b)};
            best = std::move(w);
            break;
        }
    }
    return best;
}

}  // namespace

MinimaxReport classify_alternative(const BivariateField& f, const ClassifyOptions& opts) {
    require_nonempty(f);
    MinimaxReport rep;
    const ArgValue si = sup_inf_arg(f);
    const ArgValue is = inf_sup_arg(f);
    rep.sup_inf = si.value;
    rep.inf_sup = is.value;
    rep.sup_inf_y_index = si.index;
    rep.inf_sup_x_index = is.index;
    rep.gap = is.value - si.value;
    rep.gap_tol = opts.gap_tol.value_or(1e-7 * (1.0 + std::abs(is.value)));
    if (!(rep.gap_tol >= 0.0)) fail(ErrorKind::InvalidArgument, "classify_alternative: gap_tol must be non-negative");

    rep.gap_closed = std::abs(rep.gap) <= rep.gap_tol;
    rep.two_minima = exact_two_minima(f, opts.tol);
    if (auto w = interpolated_two_minima(f, opts.tol)) {
        if (!rep.two_minima || w->y_index < rep.two_minima->y_index) rep.two_minima = std::move(w);
    }

    if (rep.gap_closed) {
        rep.alternative = Alternative::GapClosed;
        return rep;
    }
    if (rep.two_minima) {
        rep.alternative = Alternative::TwoMinima;
        return rep;
    }
    rep.alternative = Alternative::Inconclusive;
    const double tol_val = opts.tol.tol_val.value_or(default_tol_val(rep.sup_inf));
    if (auto d = find_quasi_concavity_violation(f, tol_val)) {
        rep.diagnostic = std::move(d);
    } else if (auto d2 = find_discontinuity(f)) {
        rep.diagnostic = std::move(d2);
    } else {
        Diagnostic d3;
        d3.kind = Diagnostic::Kind::Unresolved;
        d3.message = "gap exceeds gap_tol but no slice has two separated minima at this resolution";
        rep.diagnostic = std::move(d3);
    }
    return rep;
}

std::vector<double> simplex_lift(std::span<const double> mus) {
    // S_1 = {(1)}; each level maps (s, mu) to (mu * s, 1 - mu).
    std::vector<double> lam{1.0};
    for (double mu : mus) {
        for (double& c : lam) c *= mu;
        lam.push_back(1.0 - mu);
    }
    return lam;
}

SimplexResult simplex_sup_inf(const SimplexFunction& f, const GridSpec& x_domain, std::size_t n, std::size_t m) {
    if (n == 0) fail(ErrorKind::InvalidArgument, "simplex_sup_inf: n must be at least 1");
    if (x_domain.size() == 0) fail(ErrorKind::EmptyGrid, "simplex_sup_inf: empty X");
    if (n > 1 && m < 2) fail(ErrorKind::InvalidArgument, "simplex_sup_inf: m must be at least 2");

    const std::size_t nx = x_domain.size();
    const std::size_t dx = x_domain.dim();
    std::vector<double> xs(nx * dx);
    for (std::size_t i = 0; i < nx; ++i) x_domain.point_into(i, std::span<double>(xs.data() + i * dx, dx));

    const std::vector<double> mu_grid = n > 1 ? linspace(0.0, 1.0, m) : std::vector<double>{};

    auto inner = [&](std::span<const double> lam) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < nx; ++i) {
            best = std::min(best, f(std::span<const double>(xs.data() + i * dx, dx), lam));
        }
        return best;
    };

    if (n == 1) {
        const std::vector<double> lam{1.0};
        return {inner(lam), lam, nx};
    }

    // Levels are enumerated depth-first; the outermost mu (which sets the last
    // coordinate) is split across workers.
    struct Best {
        double value = -std::numeric_limits<double>::infinity();
        std::vector<double> lambda;
        std::size_t evals = 0;
    };
    const std::size_t levels = n - 1;
    const auto partial = parallel_chunks<Best>(m, [&](std::size_t begin, std::size_t end) {
        Best b;
        std::vector<std::size_t> idx(levels, 0);
        std::vector<double> lam(n);
        for (std::size_t top = begin; top < end; ++top) {
            std::fill(idx.begin(), idx.end(), 0);
            idx[levels - 1] = top;
            while (true) {
                lift_into(idx, mu_grid, lam);
                const double v = inner(lam);
                b.evals += nx;
                if (v > b.value) {
                    b.value = v;
                    b.lambda = lam;
                }
                std::size_t l = 0;
                while (l + 1 < levels && ++idx[l] == m) idx[l++] = 0;
                if (l + 1 == levels) break;
            }
        }
        return b;
    });
    SimplexResult out;
    out.value = -std::numeric_limits<double>::infinity();
    for (const Best& b : partial) {
        out.evaluations += b.evals;
        if (b.value > out.value) {
            out.value = b.value;
            out.lambda = b.lambda;
        }
    }
    return out;
}

void validate_filtering_cover(const std::vector<std::vector<std::size_t>>& cover, std::size_t universe) {
    if (cover.empty()) fail(ErrorKind::Validation, "cover: empty family");
    std::vector<std::vector<std::size_t>> sets;
    std::vector<char> seen(universe, 0);
    for (std::size_t c = 0; c < cover.size(); ++c) {
        std::vector<std::size_t> s = cover[c];
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
        for (std::size_t i : s) {
            if (i >= universe) {
                fail(ErrorKind::Validation, "cover: member " + std::to_string(c) + " references y index " +
                                                std::to_string(i) + " outside the grid");
            }
            seen[i] = 1;
        }
        sets.push_back(std::move(s));
    }
    for (std::size_t i = 0; i < universe; ++i) {
        if (!seen[i]) fail(ErrorKind::Validation, "cover: non-covering family, y index " + std::to_string(i) + " missed");
    }
    for (std::size_t i = 0; i < sets.size(); ++i) {
        for (std::size_t j = i + 1; j < sets.size(); ++j) {
            std::vector<std::size_t> u;
            std::set_union(sets[i].begin(), sets[i].end(), sets[j].begin(), sets[j].end(), std::back_inserter(u));
            const bool ok = std::any_of(sets.begin(), sets.end(), [&](const auto& s) {
                return std::includes(s.begin(), s.end(), u.begin(), u.end());
            });
            if (!ok) {
                fail(ErrorKind::Validation, "cover: non-filtering family",
                     "members " + std::to_string(i) + " and " + std::to_string(j) +
                         " have no member containing their union");
            }
        }
    }
}

double cover_sup_inf(const BivariateField& f, const std::vector<std::vector<std::size_t>>& cover) {
    require_nonempty(f);
    validate_filtering_cover(cover, f.ny());
    std::vector<double> colmin(f.ny(), std::numeric_limits<double>::infinity());
    for (std::size_t ix = 0; ix < f.nx(); ++ix) {
        const auto r = f.row(ix);
        for (std::size_t iy = 0; iy < f.ny(); ++iy) colmin[iy] = std::min(colmin[iy], r[iy]);
    }
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& member : cover) {
        for (std::size_t iy : member) best = std::max(best, colmin[iy]);
    }
    return best;
}

}  // namespace mmlab::minimax
