#include "mmlab/strict_minimax.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>

#include "mmlab/error.hpp"
#include "mmlab/parallel.hpp"

namespace mmlab::strict {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<Point> lambdas_of(const ThetaProblem& p) {
    const GridSpec& g = p.J.domain();
    std::vector<Point> out(g.size());
    Point x(g.dim());
    for (std::size_t i = 0; i < g.size(); ++i) {
        g.point_into(i, x);
        out[i] = p.lambda_map(x);
    }
    return out;
}

std::vector<Point> points_of(const GridSpec& g) {
    std::vector<Point> out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = g.point(i);
    return out;
}

}  // namespace

void ThetaProblem::validate() const {
    if (!phi || !psi || !lambda_map) fail(ErrorKind::Validation, "theta problem: phi, Psi and lambda_map are required");
    if (std::abs(phi(y0)) > 1e-14) fail(ErrorKind::Validation, "theta problem: phi(y0) must vanish");
    const GridSpec& g = J.domain();
    Point x(g.dim());
    Point first;
    bool varies = false;
    for (std::size_t i = 0; i < g.size(); ++i) {
        g.point_into(i, x);
        const Point lam = lambda_map(x);
        const Point y = psi(x, lam);
        if (y.size() != y0.size() || distance(y, y0) > 1e-9 * (1.0 + std::sqrt(std::inner_product(y0.begin(), y0.end(), y0.begin(), 0.0)))) {
            fail(ErrorKind::Validation, "theta problem: Psi(x, lambda_x) differs from y0", "grid index " + std::to_string(i));
        }
        if (i == 0) first = lam;
        else if (distance(lam, first) > lambda_sep) varies = true;
    }
    if (!varies) fail(ErrorKind::Validation, "theta problem: x -> lambda_x is constant");
}

ThetaProblem quadratic_problem(ScalarField J, PointFn phi_map, Tolerances tol) {
    ThetaProblem p{std::move(J), nullptr, nullptr, nullptr, {}, tol};
    p.phi = [](std::span<const double> y) {
        double s = 0.0;
        for (double v : y) s += v * v;
        return s;
    };
    p.psi = [phi_map](std::span<const double> x, std::span<const double> lam) {
        Point y = phi_map(x);
        for (std::size_t k = 0; k < y.size(); ++k) y[k] -= lam[k];
        return y;
    };
    p.lambda_map = phi_map;
    const Point probe(p.J.domain().dim(), 0.0);
    p.y0 = Point(phi_map(probe).size(), 0.0);
    return p;
}

ThetaResult theta(const ThetaProblem& p) {
    p.validate();
    ThetaResult res;
    res.minima = global_minima(p.J, p.tol);
    const GridSpec& g = p.J.domain();
    const auto lam = lambdas_of(p);
    const auto xs = points_of(g);

    struct Partial {
        double best = kInf;
        std::size_t u = 0, x = 0;
        std::size_t pairs = 0, skipped = 0;
        bool found = false;
    };
    const auto parts = parallel_chunks<Partial>(g.size(), [&](std::size_t begin, std::size_t end) {
        Partial part;
        for (std::size_t u : res.minima.indices) {
            const double Ju = p.J.value(u);
            for (std::size_t x = begin; x < end; ++x) {
                if (distance(lam[x], lam[u]) <= p.lambda_sep) continue;
                ++part.pairs;
                const double den = p.phi(p.psi(xs[x], lam[u]));
                if (den <= p.phi_floor) {
                    ++part.skipped;
                    continue;
                }
                const double q = (p.J.value(x) - Ju) / den;
                if (!part.found || q < part.best) {
                    part.best = q;
                    part.u = u;
                    part.x = x;
                    part.found = true;
                }
            }
        }
        return part;
    });
    bool found = false;
    double best = kInf;
    for (const Partial& part : parts) {
        res.pairs += part.pairs;
        res.skipped += part.skipped;
        if (part.found && (!found || part.best < best)) {
            best = part.best;
            res.u_index = part.u;
            res.x_index = part.x;
            found = true;
        }
    }
    if (found) res.theta = best;
    return res;
}

ThetaResult theta_quadratic(const ScalarField& J, const PointFn& phi_map, Tolerances tol) {
    return theta(quadratic_problem(J, phi_map, tol));
}

void validate_weakly_filtering(const Cover& cover, std::size_t universe) {
    if (cover.empty()) fail(ErrorKind::Validation, "cover: empty family");
    const std::size_t words = (cover.size() + 63) / 64;
    std::vector<std::uint64_t> in(universe * words, 0);
    for (std::size_t c = 0; c < cover.size(); ++c) {
        if (cover[c].empty()) fail(ErrorKind::Validation, "cover: member " + std::to_string(c) + " is empty");
        for (std::size_t i : cover[c]) {
            if (i >= universe) fail(ErrorKind::Validation, "cover: index " + std::to_string(i) + " outside the grid");
            in[i * words + c / 64] |= std::uint64_t{1} << (c % 64);
        }
    }
    for (std::size_t i = 0; i < universe; ++i) {
        for (std::size_t j = i; j < universe; ++j) {
            bool shared = false;
            for (std::size_t w = 0; w < words && !shared; ++w) shared = (in[i * words + w] & in[j * words + w]) != 0;
            if (!shared) {
                fail(ErrorKind::Validation, "cover: not weakly filtering",
                     "grid indices " + std::to_string(i) + " and " + std::to_string(j) + " share no member");
            }
        }
    }
}

MemberSides member_sides(const ThetaProblem& p, double mu, const std::vector<std::size_t>& A, std::size_t member) {
    const GridSpec& g = p.J.domain();
    std::vector<Point> xs(A.size()), lam(A.size());
    for (std::size_t k = 0; k < A.size(); ++k) {
        xs[k] = g.point(A[k]);
        lam[k] = p.lambda_map(xs[k]);
    }
    // D: the lambda_x of A plus midpoints of lexicographic neighbours.
    std::vector<Point> D = lam;
    std::sort(D.begin(), D.end(), [](const Point& a, const Point& b) { return lex_less(a, b); });
    D.erase(std::unique(D.begin(), D.end()), D.end());
    const std::size_t base = D.size();
    for (std::size_t k = 1; k < base; ++k) {
        Point m(D[k].size());
        for (std::size_t d = 0; d < m.size(); ++d) m[d] = 0.5 * (D[k - 1][d] + D[k][d]);
        D.push_back(std::move(m));
    }
    auto val = [&](std::size_t k, const Point& l) { return p.J.value(A[k]) - mu * p.phi(p.psi(xs[k], l)); };

    const auto lhs_parts = parallel_chunks<double>(D.size(), [&](std::size_t begin, std::size_t end) {
        double best = -kInf;
        for (std::size_t d = begin; d < end; ++d) {
            double inner = kInf;
            for (std::size_t k = 0; k < A.size(); ++k) inner = std::min(inner, val(k, D[d]));
            best = std::max(best, inner);
        }
        return best;
    }, 64);
    const auto rhs_parts = parallel_chunks<double>(A.size(), [&](std::size_t begin, std::size_t end) {
        double best = kInf;
        for (std::size_t k = begin; k < end; ++k) {
            double inner = -kInf;
            for (std::size_t z = 0; z < A.size(); ++z) inner = std::max(inner, val(k, lam[z]));
            best = std::min(best, inner);
        }
        return best;
    }, 64);
    MemberSides s;
    s.member = member;
    s.lhs = *std::max_element(lhs_parts.begin(), lhs_parts.end());
    s.rhs = *std::min_element(rhs_parts.begin(), rhs_parts.end());
    return s;
}

GapWitness strict_gap_witness(const ThetaProblem& p, double mu, const Cover& cover) {
    const ThetaResult th = theta(p);
    if (!(ExtendedReal(mu) > th.theta)) {
        fail(ErrorKind::InvalidArgument, "strict_gap_witness: requires mu > theta",
             "mu = " + ExtendedReal(mu).to_string() + ", theta = " + th.theta.to_string());
    }
    const GridSpec& g = p.J.domain();
    validate_weakly_filtering(cover, g.size());
    const auto lam = lambdas_of(p);
    const auto xs = points_of(g);
    for (std::size_t u : th.minima.indices) {
        const double Ju = p.J.value(u);
        for (std::size_t x1 = 0; x1 < g.size(); ++x1) {
            if (distance(lam[x1], lam[u]) <= p.lambda_sep) continue;
            if (!(p.J.value(x1) - mu * p.phi(p.psi(xs[x1], lam[u])) < Ju)) continue;
            for (std::size_t c = 0; c < cover.size(); ++c) {
                const auto& A = cover[c];
                if (std::find(A.begin(), A.end(), u) == A.end() || std::find(A.begin(), A.end(), x1) == A.end()) continue;
                const MemberSides s = member_sides(p, mu, A, c);
                if (s.lhs < s.rhs) return GapWitness{s, u, x1};
            }
        }
    }
    fail(ErrorKind::NoWitness, "strict_gap_witness: no member shows a strict gap on this lambda sampling",
         "mu = " + ExtendedReal(mu).to_string());
}

LowerBoundReport check_theta_lower_bound(const ThetaProblem& p, double mu, const Cover& cover) {
    validate_weakly_filtering(cover, p.J.domain().size());
    LowerBoundReport rep;
    for (std::size_t c = 0; c < cover.size(); ++c) {
        rep.members.push_back(member_sides(p, mu, cover[c], c));
        if (rep.members.back().lhs < rep.members.back().rhs) rep.holds = false;
    }
    return rep;
}

Cover whole_cover(std::size_t n) {
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    return {all};
}

}  // namespace mmlab::strict
