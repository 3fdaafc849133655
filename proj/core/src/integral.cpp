#include "mmlab/integral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "mmlab/error.hpp"
#include "mmlab/multiplier_path.hpp"
#include "mmlab/parallel.hpp"

namespace mmlab::integral {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kBlock = 1024;

std::string num(double v) { return ExtendedReal(v).to_string(); }

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t block) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32)};
    std::uint32_t words[2];
    seq.generate(words, words + 2);
    return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

// Exact points of psi = r on grid edges that straddle the level, and the least phi among them.
std::optional<double> level_set_inf(const ScalarField& phi, const ScalarField& psi, double r) {
    if (!phi.has_evaluator() || !psi.has_evaluator()) return std::nullopt;
    const GridSpec& g = psi.domain();
    double best = kInf;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double si = psi.value(i) - r;
        if (si == 0.0) {
            best = std::min(best, phi.value(i));
            continue;
        }
        for (std::size_t k : g.neighbors(i)) {
            if (k < i) continue;
            const double sk = psi.value(k) - r;
            if (sk == 0.0 || (si > 0.0) == (sk > 0.0)) continue;
            Point lo = g.point(i), hi = g.point(k), mid(lo.size());
            for (int it = 0; it < 100; ++it) {
                for (std::size_t d = 0; d < mid.size(); ++d) mid[d] = 0.5 * (lo[d] + hi[d]);
                if (mid == lo || mid == hi) break;
                ((psi.eval(mid) - r > 0.0) == (si > 0.0) ? lo : hi) = mid;
            }
            const Point& at = std::abs(psi.eval(lo) - r) <= std::abs(psi.eval(hi) - r) ? lo : hi;
            best = std::min(best, phi.eval(at));
        }
    }
    if (!std::isfinite(best)) return std::nullopt;
    return best;
}

}  // namespace

void WeightedSpace::validate() const {
    if (weights.empty()) fail(ErrorKind::Validation, "weighted space: no atoms");
    for (std::size_t t = 0; t < weights.size(); ++t) {
        if (!(weights[t] > 0.0) || !std::isfinite(weights[t])) {
            fail(ErrorKind::Validation, "weighted space: weights must be positive and finite",
                 "weight " + std::to_string(t) + " = " + num(weights[t]));
        }
    }
    if (!(p > 0.0) || !std::isfinite(p)) fail(ErrorKind::Validation, "weighted space: p must be positive", "p = " + num(p));
}

double WeightedSpace::total() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
}

Eq82Report verify_eq82(const ScalarField& phi, const ScalarField& psi, const WeightedSpace& w, double r,
                       const Eq82Options& opts) {
    w.validate();
    if (!(phi.domain() == psi.domain())) fail(ErrorKind::Validation, "verify_eq82: phi and psi live on different grids");
    const GridSpec& g = phi.domain();
    const path::MultiplierProblem prob(phi, psi, opts.a, opts.b, opts.tol);

    Eq82Report rep;
    rep.r = r;
    rep.seed = opts.seed;
    rep.block_size = kBlock;
    rep.total_weight = w.total();
    const path::AlphaBeta ab = path::alpha_beta(prob);
    rep.alpha = ab.alpha;
    rep.beta = ab.beta;
    if (!(ab.alpha < ExtendedReal(r) && ExtendedReal(r) < ab.beta)) {
        fail(ErrorKind::RangeError, "verify_eq82: r outside ]alpha, beta[",
             "r = " + num(r) + ", alpha = " + ab.alpha.to_string() + ", beta = " + ab.beta.to_string());
    }

    // Grid view of psi = r.
    std::size_t nearest = 0;
    for (std::size_t i = 1; i < g.size(); ++i) {
        if (std::abs(psi.value(i) - r) < std::abs(psi.value(nearest) - r)) nearest = i;
    }
    double res = 0.0;
    for (std::size_t k : g.neighbors(nearest)) res = std::max(res, std::abs(psi.value(k) - psi.value(nearest)));
    rep.band = std::max(2.0 * res, 1e-9 * (1.0 + std::abs(r)));
    rep.band_inf = kInf;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (std::abs(psi.value(i) - r) <= rep.band) rep.band_inf = std::min(rep.band_inf, phi.value(i));
    }
    if (!std::isfinite(rep.band_inf)) {
        fail(ErrorKind::RangeError, "verify_eq82: psi does not reach r on the grid", "r = " + num(r));
    }

    Point ach;
    try {
        const path::WellPosedCertificate c = path::solve_constrained(prob, r);
        rep.lambda_hat = c.lambda_hat;
        // Lagrangian bound: valid for every tuple since y_hat minimises phi + lambda psi.
        rep.pointwise_inf = c.J_value + c.lambda_hat * (c.phi_value - r);
        ach = c.x_hat;
        rep.status = "holds";
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::NonUniqueMinimum) throw;
        rep.status = "identity_not_guaranteed";
        rep.hypothesis_error = std::string(e.what()) + (e.context().empty() ? "" : " (" + e.context() + ")");
        rep.pointwise_inf = level_set_inf(phi, psi, r).value_or(rep.band_inf);
        std::size_t best = nearest;
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (std::abs(psi.value(i) - r) <= rep.band && phi.value(i) < phi.value(best)) best = i;
        }
        ach = g.point(best);
    }
    rep.rhs = rep.pointwise_inf * rep.total_weight;
    rep.tol = 1e-9 * (1.0 + std::abs(rep.rhs));
    const std::size_t T = w.weights.size();
    auto make_tuple = [&](std::vector<Point> u) {
        Tuple t;
        for (std::size_t s = 0; s < T; ++s) {
            t.objective += w.weights[s] * phi.eval(u[s]);
            t.constraint += w.weights[s] * psi.eval(u[s]);
        }
        t.u = std::move(u);
        return t;
    };
    rep.achieving = make_tuple(std::vector<Point>(T, ach));

    const double cap = r * rep.total_weight;
    auto violates = [&](double objective) { return objective < rep.rhs - rep.tol; };

    // Every feasible constant tuple.
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (psi.value(i) > r) continue;
        ++rep.constant_tuples;
        const double obj = phi.value(i) * rep.total_weight;
        if (violates(obj)) ++rep.constant_violations;
        if (!rep.best_constant || obj < rep.best_constant->objective) {
            rep.best_constant = make_tuple(std::vector<Point>(T, g.point(i)));
        }
    }
    if (rep.constant_tuples == 0) {
        fail(ErrorKind::RangeError, "verify_eq82: no grid point satisfies psi <= r", "r = " + num(r));
    }

    // Projection anchor: the feasible constant tuple at the least psi.
    std::size_t anchor = 0;
    for (std::size_t i = 1; i < g.size(); ++i) {
        if (psi.value(i) < psi.value(anchor)) anchor = i;
    }
    const Point c = g.point(anchor);

    struct Partial {
        std::size_t accepted = 0, projected = 0, violations = 0;
        std::optional<Tuple> worst;
    };
    const std::size_t blocks = (opts.samples + kBlock - 1) / kBlock;
    auto run = [&](bool project) {
        return parallel_chunks<Partial>(blocks, [&](std::size_t begin, std::size_t end) {
            Partial part;
            std::vector<std::size_t> idx(T);
            std::vector<Point> u(T);
            for (std::size_t b = begin; b < end; ++b) {
                std::mt19937_64 rng(stream_seed(opts.seed, b));
                std::uniform_int_distribution<std::size_t> pick(0, g.size() - 1);
                const std::size_t n = std::min(kBlock, opts.samples - b * kBlock);
                for (std::size_t s = 0; s < n; ++s) {
                    double con = 0.0;
                    for (std::size_t t = 0; t < T; ++t) {
                        idx[t] = pick(rng);
                        con += w.weights[t] * psi.value(idx[t]);
                    }
                    Tuple tup;
                    if (con <= cap) {
                        ++part.accepted;
                        for (std::size_t t = 0; t < T; ++t) u[t] = g.point(idx[t]);
                        tup.u = u;
                        for (std::size_t t = 0; t < T; ++t) tup.objective += w.weights[t] * phi.value(idx[t]);
                        tup.constraint = con;
                    } else if (project) {
                        ++part.projected;
                        for (std::size_t t = 0; t < T; ++t) u[t] = g.point(idx[t]);
                        auto at = [&](double sc) {
                            std::vector<Point> v(T, c);
                            for (std::size_t t = 0; t < T; ++t) {
                                for (std::size_t d = 0; d < c.size(); ++d) v[t][d] = c[d] + sc * (u[t][d] - c[d]);
                            }
                            return v;
                        };
                        auto constraint = [&](const std::vector<Point>& v) {
                            double sum = 0.0;
                            for (std::size_t t = 0; t < T; ++t) sum += w.weights[t] * psi.eval(v[t]);
                            return sum;
                        };
                        double lo = 0.0, hi = 1.0;
                        for (int it = 0; it < 60; ++it) {
                            const double mid = 0.5 * (lo + hi);
                            (constraint(at(mid)) <= cap ? lo : hi) = mid;
                        }
                        tup = make_tuple(at(lo));
                    } else {
                        continue;
                    }
                    if (violates(tup.objective)) ++part.violations;
                    if (!part.worst || tup.objective < part.worst->objective) part.worst = std::move(tup);
                }
            }
            return part;
        }, 1);
    };
    auto merge = [&](const std::vector<Partial>& parts) {
        rep.accepted = rep.projected = rep.violations = 0;
        rep.worst.reset();
        for (const Partial& part : parts) {
            rep.accepted += part.accepted;
            rep.projected += part.projected;
            rep.violations += part.violations;
            if (part.worst && (!rep.worst || part.worst->objective < rep.worst->objective)) rep.worst = part.worst;
        }
    };
    rep.samples = opts.samples;
    merge(run(false));
    if (opts.samples > 0 && static_cast<double>(rep.accepted) < 0.01 * static_cast<double>(opts.samples)) {
        rep.projection_used = true;
        merge(run(true));
    }

    if (rep.status == "holds" && (rep.violations > 0 || rep.constant_violations > 0)) rep.status = "violated";
    return rep;
}

JensenReport jensen_check(const RealFn& f, const WeightedSpace& w, const std::vector<double>& u) {
    w.validate();
    if (u.size() != w.weights.size()) {
        fail(ErrorKind::InvalidArgument, "jensen_check: u and the weights differ in length",
             std::to_string(u.size()) + " values, " + std::to_string(w.weights.size()) + " weights");
    }
    JensenReport rep;
    const double total = w.total();
    double moment = 0.0;
    for (std::size_t t = 0; t < u.size(); ++t) {
        rep.lhs += w.weights[t] * f(u[t]);
        moment += w.weights[t] * std::pow(std::abs(u[t]), w.p);
    }
    rep.p_mean = std::pow(moment / total, 1.0 / w.p);
    rep.rhs = f(rep.p_mean) * total;
    if (!std::isfinite(rep.lhs) || !std::isfinite(rep.rhs)) {
        fail(ErrorKind::NonFinite, "jensen_check: f produced a non-finite value",
             "lhs = " + num(rep.lhs) + ", rhs = " + num(rep.rhs));
    }
    rep.tol = 1e-12 * (1.0 + std::abs(rep.rhs));
    rep.holds = rep.lhs <= rep.rhs + rep.tol;
    rep.equal = std::abs(rep.lhs - rep.rhs) <= rep.tol;
    return rep;
}

JensenReport jensen_check(const ScalarField& f, const WeightedSpace& w, const std::vector<double>& u) {
    if (f.domain().dim() != 1) fail(ErrorKind::InvalidArgument, "jensen_check: f must be a function of one variable");
    if (!f.has_evaluator()) fail(ErrorKind::InvalidArgument, "jensen_check: f needs an evaluator, not a table");
    return jensen_check([&f](double y) { return f.eval(std::span<const double>(&y, 1)); }, w, u);
}

JensenReport log_inequality_check(const WeightedSpace& w, const std::vector<double>& u) {
    w.validate();
    if (u.size() != w.weights.size()) {
        fail(ErrorKind::InvalidArgument, "log_inequality_check: u and the weights differ in length");
    }
    JensenReport rep;
    const double total = w.total();
    double moment = 0.0;
    for (std::size_t t = 0; t < u.size(); ++t) {
        const double m = std::pow(std::abs(u[t]), w.p);
        rep.lhs += w.weights[t] * std::log1p(m);
        moment += w.weights[t] * m;
    }
    rep.p_mean = std::pow(moment / total, 1.0 / w.p);
    rep.rhs = std::log1p(moment / total) * total;
    rep.tol = 1e-12 * (1.0 + std::abs(rep.rhs));
    rep.holds = rep.lhs <= rep.rhs + rep.tol;
    rep.equal = std::abs(rep.lhs - rep.rhs) <= rep.tol;
    return rep;
}

}  // namespace mmlab::integral
