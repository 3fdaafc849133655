#include "mmlab/multiplier_path.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/tools/minima.hpp>

#include "mmlab/error.hpp"

namespace mmlab::path {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string points_text(const MinimaCluster& m) {
    std::string s;
    for (std::size_t k = 0; k < m.points.size(); ++k) {
        if (k) s += "; ";
        s += "(";
        for (std::size_t d = 0; d < m.points[k].size(); ++d) {
            if (d) s += ", ";
            s += ExtendedReal(m.points[k][d]).to_string();
        }
        s += ")";
    }
    return s;
}

std::vector<double> combined(const MultiplierProblem& p, double lambda) {
    const auto J = p.J().values();
    const auto P = p.Phi().values();
    std::vector<double> v(J.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = J[i] + lambda * P[i];
    return v;
}

void polish(const MultiplierProblem& p, double lambda, InnerResult& res) {
    const GridSpec& g = p.domain();
    Point x = res.point;
    auto objective = [&](const Point& y) { return p.J().eval(y) + lambda * p.Phi().eval(y); };
    double best = objective(x);
    for (int sweep = 0; sweep < 2; ++sweep) {
        for (std::size_t d = 0; d < g.dim(); ++d) {
            const auto& ax = g.axis(d);
            const double h = ax[1] - ax[0];
            const double lo = std::max(g.lo()[d], x[d] - h);
            const double hi = std::min(g.hi()[d], x[d] + h);
            Point y = x;
            auto line = [&](double t) {
                y[d] = t;
                return objective(y);
            };
            std::uintmax_t iters = 200;
            const auto [t, v] =
                boost::math::tools::brent_find_minima(line, lo, hi, std::numeric_limits<double>::digits / 2, iters);
            if (v < best) {
                best = v;
                x[d] = t;
            }
        }
    }
    res.point = std::move(x);
    res.J = p.J().eval(res.point);
    res.Phi = p.Phi().eval(res.point);
    res.value = res.J + lambda * res.Phi;
}

double local_resolution(const GridSpec& g, std::span<const double> values, std::size_t i) {
    double res = 0.0;
    for (std::size_t k : g.neighbors(i)) res = std::max(res, std::abs(values[k] - values[i]));
    return res;
}

double start_lambda(ExtendedReal a, ExtendedReal b) {
    if (a.is_finite() && b.is_finite()) return 0.5 * (a.value() + b.value());
    if (a.is_finite()) return a.value() + std::max(1.0, std::abs(a.value()));
    if (b.is_finite()) return b.value() - std::max(1.0, std::abs(b.value()));
    return 1.0;
}

// k-th geometric probe from `start` toward the upper (up=true) or lower end.
double probe(double start, ExtendedReal end, bool up, std::size_t k) {
    const double scale = std::pow(10.0, static_cast<double>(k));
    if (!end.is_finite()) return up ? start + scale : start - scale;
    return end.value() + (start - end.value()) / scale;
}

}  // namespace

MultiplierProblem::MultiplierProblem(ScalarField J, ScalarField Phi, ExtendedReal a, ExtendedReal b, Tolerances tol)
    : J_(std::move(J)), Phi_(std::move(Phi)), a_(a), b_(b), tol_(tol) {
    if (!(J_.domain() == Phi_.domain())) fail(ErrorKind::Validation, "multiplier problem: J and Phi live on different grids");
    if (!(a_ < b_)) fail(ErrorKind::Validation, "multiplier problem: need a < b", a_.to_string() + " >= " + b_.to_string());
    if (a_.is_pos_inf() || b_.is_neg_inf()) fail(ErrorKind::Validation, "multiplier problem: empty multiplier interval");
}

bool MultiplierProblem::polishing_active() const {
    return polish_ && J_.has_evaluator() && Phi_.has_evaluator() && domain().kind() == GridSpec::Kind::Uniform;
}

bool MultiplierProblem::contains(double lambda) const {
    return std::isfinite(lambda) && a_ < ExtendedReal(lambda) && ExtendedReal(lambda) < b_;
}

InnerResult grid_inner_minimize(const MultiplierProblem& p, double lambda) {
    const auto v = combined(p, lambda);
    const MinimaCluster m = minima_of_values(p.domain(), v, p.tol());
    if (m.count() >= 2) {
        fail(ErrorKind::NonUniqueMinimum,
             "J + lambda*Phi has " + std::to_string(m.count()) + " separated global minima at lambda = " +
                 ExtendedReal(lambda).to_string(),
             points_text(m));
    }
    InnerResult res;
    res.index = m.indices[0];
    res.point = m.points[0];
    res.J = p.J().value(res.index);
    res.Phi = p.Phi().value(res.index);
    res.value = v[res.index];
    if (p.polishing_active()) polish(p, lambda, res);
    return res;
}

InnerResult inner_minimize(const MultiplierProblem& p, double lambda) {
    if (!p.contains(lambda)) {
        fail(ErrorKind::RangeError, "inner_minimize: lambda outside ]a, b[",
             "lambda = " + ExtendedReal(lambda).to_string());
    }
    return p.minimizer() ? p.minimizer()(p, lambda) : grid_inner_minimize(p, lambda);
}

double inf_value(const MultiplierProblem& p, double lambda) {
    const auto v = combined(p, lambda);
    return *std::min_element(v.begin(), v.end());
}

AlphaBeta alpha_beta(const MultiplierProblem& p) {
    AlphaBeta ab;
    const double inf_phi = p.Phi().min_value();
    const double sup_phi = p.Phi().max_value();
    auto phi_range = [&](const MinimaCluster& m) {
        double lo = kInf, hi = -kInf;
        for (std::size_t i : m.indices) {
            lo = std::min(lo, p.Phi().value(i));
            hi = std::max(hi, p.Phi().value(i));
        }
        return std::pair{lo, hi};
    };
    ab.beta = sup_phi;
    if (p.a().is_finite()) {
        ab.M_a = minima_of_values(p.domain(), combined(p, p.a().value()), p.tol());
        ab.beta = std::min(sup_phi, phi_range(*ab.M_a).first);
    }
    ab.alpha = inf_phi;
    if (p.b().is_finite()) {
        ab.M_b = minima_of_values(p.domain(), combined(p, p.b().value()), p.tol());
        ab.alpha = std::max(inf_phi, phi_range(*ab.M_b).second);
    }
    ab.ordered = ab.alpha <= ab.beta;
    return ab;
}

WellPosedCertificate solve_constrained(const MultiplierProblem& p, double r, const SolveOptions& opts) {
    if (!std::isfinite(r)) fail(ErrorKind::InvalidArgument, "solve_constrained: r must be finite");
    const double tol = opts.bisect_tol.value_or(1e-9 * (1.0 + std::abs(r)));
    const AlphaBeta ab = alpha_beta(p);
    if (!(ab.alpha < ExtendedReal(r) && ExtendedReal(r) < ab.beta)) {
        fail(ErrorKind::RangeError, "solve_constrained: r outside ]alpha, beta[",
             "r = " + ExtendedReal(r).to_string() + ", alpha = " + ab.alpha.to_string() +
                 ", beta = " + ab.beta.to_string());
    }

    std::size_t evals = 0;
    auto probe_at = [&](double lambda) {
        ++evals;
        return inner_minimize(p, lambda);
    };

    // Bracket: g(lo) > r > g(hi), g non-increasing.
    double lo = start_lambda(p.a(), p.b());
    InnerResult at_lo = probe_at(lo);
    double hi = lo;
    InnerResult at_hi = at_lo;
    std::optional<std::pair<double, InnerResult>> hit;
    if (std::abs(at_lo.Phi - r) <= tol) {
        hit.emplace(lo, at_lo);
    } else {
        const bool up = at_lo.Phi > r;
        const ExtendedReal end = up ? p.b() : p.a();
        const double start = lo;
        bool crossed = false;
        double prev = start;
        InnerResult at_prev = at_lo;
        for (std::size_t k = 1; k <= opts.max_expand && !crossed; ++k) {
            const double lam = probe(start, end, up, k);
            if (!p.contains(lam) || lam == prev) break;
            InnerResult res = probe_at(lam);
            if (std::abs(res.Phi - r) <= tol) {
                hit.emplace(lam, res);
                crossed = true;
            } else if (up ? res.Phi < r : res.Phi > r) {
                crossed = true;
                if (up) {
                    lo = prev, at_lo = at_prev, hi = lam, at_hi = res;
                } else {
                    lo = lam, at_lo = res, hi = prev, at_hi = at_prev;
                }
            }
            prev = lam;
            at_prev = std::move(res);
        }
        if (!crossed) {
            fail(ErrorKind::NoBracket, "solve_constrained: Phi(y_lambda) never crosses r while expanding lambda",
                 "r = " + ExtendedReal(r).to_string() + ", last lambda = " + ExtendedReal(prev).to_string() +
                     ", Phi = " + ExtendedReal(at_prev.Phi).to_string());
        }
    }

    std::size_t iter = 0;
    bool collapsed = false;
    while (!hit) {
        if (++iter > opts.max_iter) fail(ErrorKind::MaxIter, "solve_constrained: bisection budget exhausted");
        const double mid = 0.5 * (lo + hi);
        const double floor = 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi));
        if (hi - lo <= floor || mid <= lo || mid >= hi) {
            collapsed = true;
            break;
        }
        InnerResult res = probe_at(mid);
        if (std::abs(res.Phi - r) <= tol) {
            hit.emplace(mid, std::move(res));
        } else if (res.Phi > r) {
            lo = mid;
            at_lo = std::move(res);
        } else {
            hi = mid;
            at_hi = std::move(res);
        }
    }

    WellPosedCertificate c;
    c.r = r;
    InnerResult chosen;
    if (collapsed) {
        if (distance(at_lo.point, at_hi.point) >= p.tol().tol_sep.value_or(p.domain().default_tol_sep())) {
            fail(ErrorKind::NonUniqueMinimum,
                 "solve_constrained: the multiplier path jumps across r; J + lambda*Phi has two global minima at "
                 "lambda = " + ExtendedReal(lo).to_string(),
                 "Phi jumps from " + ExtendedReal(at_lo.Phi).to_string() + " to " + ExtendedReal(at_hi.Phi).to_string());
        }
        const bool use_lo = std::abs(at_lo.Phi - r) <= std::abs(at_hi.Phi - r);
        c.lambda_hat = use_lo ? lo : hi;
        c.lambda_lo = lo;
        c.lambda_hi = hi;
        chosen = use_lo ? at_lo : at_hi;
    } else if (p.polishing_active()) {
        c.lambda_hat = c.lambda_lo = c.lambda_hi = hit->first;
        chosen = hit->second;
    } else {
        // Table-backed fields: y_lambda is constant on an interval of
        // multipliers; report the midpoint of that interval.
        const std::size_t target = hit->second.index;
        auto same = [&](double lam) {
            try {
                return probe_at(lam).index == target;
            } catch (const Error& e) {
                if (e.kind() == ErrorKind::NonUniqueMinimum) return false;
                throw;
            }
        };
        auto edge = [&](double inside, double outside) {
            for (std::size_t k = 0; k < 200; ++k) {
                const double mid = 0.5 * (inside + outside);
                if (mid == inside || mid == outside) break;
                (same(mid) ? inside : outside) = mid;
            }
            return inside;
        };
        const double left = (lo < hit->first) ? edge(hit->first, lo) : hit->first;
        const double right = (hi > hit->first) ? edge(hit->first, hi) : hit->first;
        c.lambda_lo = left;
        c.lambda_hi = right;
        c.lambda_hat = 0.5 * (left + right);
        chosen = probe_at(c.lambda_hat);
        if (chosen.index != target) {
            c.lambda_hat = hit->first;
            chosen = hit->second;
        }
    }

    c.x_hat = chosen.point;
    c.x_hat_index = chosen.index;
    c.J_value = chosen.J;
    c.phi_value = chosen.Phi;
    c.phi_residual = std::abs(chosen.Phi - r);
    c.iterations = evals;
    c.unique = true;

    const GridSpec& g = p.domain();
    const auto Jv = p.J().values();
    const auto Pv = p.Phi().values();
    const double phi_res = local_resolution(g, Pv, chosen.index);
    const double j_res = local_resolution(g, Jv, chosen.index);
    c.residual_tol = p.polishing_active() ? std::max(tol, 1e-6 * (1.0 + std::abs(r))) : std::max(tol, phi_res);
    c.band = std::max(2.0 * phi_res, tol);
    c.band_min_J = kInf;
    for (std::size_t i = 0; i < Jv.size(); ++i) {
        if (std::abs(Pv[i] - r) <= c.band) c.band_min_J = std::min(c.band_min_J, Jv[i]);
    }
    c.cross_tol = 1e-6 * (1.0 + std::abs(c.J_value)) + 2.0 * j_res;
    c.cross_check_passed = std::isfinite(c.band_min_J) && std::abs(c.J_value - c.band_min_J) <= c.cross_tol;
    return c;
}

MultiplierProblem dual_problem(const MultiplierProblem& p) {
    if (!(p.a() >= ExtendedReal(0.0))) {
        fail(ErrorKind::DomainError, "solve_dual: requires a >= 0", "a = " + p.a().to_string());
    }
    const ExtendedReal lo = p.b().is_finite() ? ExtendedReal(1.0 / p.b().value()) : ExtendedReal(0.0);
    const ExtendedReal hi = p.a().value() == 0.0 ? ExtendedReal::pos_inf() : ExtendedReal(1.0 / p.a().value());
    MultiplierProblem d(p.Phi(), p.J(), lo, hi, p.tol());
    d.set_polish(p.polish());
    return d;
}

WellPosedCertificate solve_dual(const MultiplierProblem& p, double r, const SolveOptions& opts) {
    WellPosedCertificate c = solve_constrained(dual_problem(p), r, opts);
    c.dual = true;
    return c;
}

MonotonicityReport path_monotonicity_check(const MultiplierProblem& p, const std::vector<double>& lambda_grid,
                                           std::optional<double> tol) {
    MonotonicityReport rep;
    for (std::size_t k = 0; k < lambda_grid.size(); ++k) {
        if (!p.contains(lambda_grid[k])) {
            fail(ErrorKind::InvalidArgument, "path_monotonicity_check: lambda outside ]a, b[",
                 "lambda = " + ExtendedReal(lambda_grid[k]).to_string());
        }
        if (k && !(lambda_grid[k] > lambda_grid[k - 1])) {
            fail(ErrorKind::InvalidArgument, "path_monotonicity_check: lambda grid must be strictly increasing");
        }
    }
    rep.lambdas = lambda_grid;
    double scale = 0.0;
    for (double lam : lambda_grid) {
        rep.g.push_back(inner_minimize(p, lam).Phi);
        scale = std::max(scale, std::abs(rep.g.back()));
    }
    rep.tol = tol.value_or(1e-9 * (1.0 + scale));
    std::size_t low = 0;
    for (std::size_t k = 1; k < rep.g.size(); ++k) {
        if (rep.g[k] > rep.g[low] + rep.tol) {
            rep.passed = false;
            rep.violation_lo = low;
            rep.violation_hi = k;
            break;
        }
        if (rep.g[k] < rep.g[low]) low = k;
    }
    return rep;
}

LimitReport limit_inf_phi(const MultiplierProblem& p, std::vector<double> lambda_seq) {
    if (!(p.a() == ExtendedReal(0.0))) {
        fail(ErrorKind::InvalidArgument, "limit_inf_phi: requires a = 0", "a = " + p.a().to_string());
    }
    if (lambda_seq.empty()) {
        for (int k = 1; k <= 40; ++k) {
            const double lam = std::ldexp(1.0, -k);
            if (p.contains(lam)) lambda_seq.push_back(lam);
        }
    }
    LimitReport rep;
    for (double lam : lambda_seq) {
        try {
            const InnerResult res = inner_minimize(p, lam);
            rep.lambdas.push_back(lam);
            rep.g.push_back(res.Phi);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::NonUniqueMinimum || rep.g.empty()) throw;
            rep.stopped_on_tie = true;
            break;
        }
    }
    if (rep.g.empty()) fail(ErrorKind::InvalidArgument, "limit_inf_phi: empty lambda sequence");
    rep.limit = rep.g.back();

    const double sup_phi = p.Phi().max_value();
    if (!(rep.limit < sup_phi - default_tol_val(sup_phi))) {
        fail(ErrorKind::HypothesisViolation,
             "limit_inf_phi: Phi(y_lambda) reaches sup Phi as lambda -> 0+, the growth hypothesis fails",
             "last Phi = " + ExtendedReal(rep.limit).to_string() + ", sup Phi = " + ExtendedReal(sup_phi).to_string());
    }
    const MinimaCluster M = global_minima(p.J(), p.tol());
    rep.inf_phi_on_minima = kInf;
    for (std::size_t i : M.indices) rep.inf_phi_on_minima = std::min(rep.inf_phi_on_minima, p.Phi().value(i));
    rep.difference = std::abs(rep.limit - rep.inf_phi_on_minima);
    return rep;
}

std::vector<ScanEntry> scan_path(const MultiplierProblem& p, const std::vector<double>& rs, const SolveOptions& opts) {
    std::vector<ScanEntry> out;
    for (double r : rs) {
        ScanEntry e;
        e.r = r;
        try {
            e.certificate = solve_constrained(p, r, opts);
        } catch (const Error& err) {
            e.error_kind = std::string(to_string(err.kind()));
            e.error = err.what();
        }
        out.push_back(std::move(e));
    }
    return out;
}

}  // namespace mmlab::path
