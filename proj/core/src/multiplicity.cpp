#include "mmlab/multiplicity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mmlab/error.hpp"
#include "mmlab/extended_real.hpp"
#include "mmlab/parallel.hpp"
#include "mmlab/strict_minimax.hpp"

namespace mmlab::multiplicity {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string num(double v) { return ExtendedReal(v).to_string(); }

// A two-point cluster for a tie located between samples; tol_val is widened to
// cover the residual difference of the two branch values.
MinimaCluster pair_cluster(const GridSpec& g, std::size_t a, double va, std::size_t b, double vb, const Tolerances& tol) {
    MinimaCluster m;
    m.value = std::min(va, vb);
    m.tol_val = std::max(tol.tol_val.value_or(default_tol_val(m.value)), std::abs(va - vb));
    m.tol_sep = tol.tol_sep.value_or(g.default_tol_sep());
    Point pa = g.point(a), pb = g.point(b);
    if (lex_less(pb, pa)) {
        std::swap(a, b);
        std::swap(va, vb);
        std::swap(pa, pb);
    }
    m.points = {pa, pb};
    m.indices = {a, b};
    m.point_values = {va, vb};
    m.members = {std::min(a, b), std::max(a, b)};
    return m;
}

std::vector<double> shifted(const ScalarField& J, const ScalarField& Phi, double lambda) {
    std::vector<double> v(J.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = J.value(i) + lambda * Phi.value(i);
    return v;
}

void same_domain(const ScalarField& a, const ScalarField& b, const char* what) {
    if (!(a.domain() == b.domain())) fail(ErrorKind::Validation, std::string(what) + ": fields live on different grids");
}

}  // namespace

const char* to_string(MultiplicityFinding::Context c) {
    switch (c) {
        case MultiplicityFinding::Context::LambdaScan: return "LambdaScan";
        case MultiplicityFinding::Context::RhoScan: return "RhoScan";
        case MultiplicityFinding::Context::ThreeSolutions: return "ThreeSolutions";
    }
    return "?";
}

B1Report check_b1(const ScalarField& J, const ScalarField& Phi, double rho, const Point& u1, const Point& u2) {
    same_domain(J, Phi, "check_b1");
    const double p1 = Phi.eval(u1);
    const double p2 = Phi.eval(u2);
    if (!(p1 < rho && rho < p2)) {
        fail(ErrorKind::InvalidArgument, "check_b1: requires Phi(u1) < rho < Phi(u2)",
             "Phi(u1) = " + num(p1) + ", rho = " + num(rho) + ", Phi(u2) = " + num(p2));
    }
    if (!(Phi.min_value() < rho && rho < Phi.max_value())) {
        fail(ErrorKind::InvalidArgument, "check_b1: rho must lie strictly between inf Phi and sup Phi");
    }
    B1Report r;
    r.inf_J = kInf;
    for (std::size_t i = 0; i < J.size(); ++i) {
        if (Phi.value(i) <= rho) r.inf_J = std::min(r.inf_J, J.value(i));
    }
    r.lhs = (J.eval(u1) - r.inf_J) / (rho - p1);
    r.rhs = (J.eval(u2) - r.inf_J) / (rho - p2);
    r.holds = r.lhs < r.rhs;
    return r;
}

MultiplicityFinding find_lambda_star(const ScalarField& J, const ScalarField& Phi, const std::vector<double>& lambda_scan,
                                     Tolerances tol) {
    same_domain(J, Phi, "find_lambda_star");
    for (std::size_t k = 1; k < lambda_scan.size(); ++k) {
        if (!(lambda_scan[k] > lambda_scan[k - 1])) {
            fail(ErrorKind::InvalidArgument, "find_lambda_star: lambda scan must be strictly increasing");
        }
    }
    const GridSpec& g = J.domain();
    const double tol_sep = tol.tol_sep.value_or(g.default_tol_sep());
    auto cluster_at = [&](double lam) { return minima_of_values(g, shifted(J, Phi, lam), tol); };
    auto far = [&](std::size_t a, std::size_t b) { return distance(g.point(a), g.point(b)) >= tol_sep; };

    MultiplicityFinding out;
    out.context = MultiplicityFinding::Context::LambdaScan;
    std::optional<std::size_t> prev;
    for (std::size_t k = 0; k < lambda_scan.size(); ++k) {
        MinimaCluster c = cluster_at(lambda_scan[k]);
        if (c.count() >= 2) {
            out.found = true;
            out.lambda_star = lambda_scan[k];
            out.minima = std::move(c);
            return out;
        }
        const std::size_t rep = c.indices[0];
        if (prev && far(*prev, rep)) {
            double lo = lambda_scan[k - 1], hi = lambda_scan[k];
            std::size_t a = *prev, b = rep;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (mid <= lo || mid >= hi) break;
                MinimaCluster m = cluster_at(mid);
                if (m.count() >= 2) {
                    out.found = true;
                    out.refined = true;
                    out.lambda_star = mid;
                    out.minima = std::move(m);
                    return out;
                }
                if (!far(m.indices[0], a)) {
                    lo = mid;
                    a = m.indices[0];
                } else {
                    hi = mid;
                    b = m.indices[0];
                }
            }
            // Adjacent branches at the end mean the argmin drifted, not jumped.
            if (!far(a, b)) {
                prev = rep;
                continue;
            }
            // The two branch values are affine in lambda; take their crossing.
            double cross = 0.5 * (lo + hi);
            const double dphi = Phi.value(a) - Phi.value(b);
            if (dphi != 0.0) {
                const double c2 = (J.value(b) - J.value(a)) / dphi;
                if (c2 >= lo && c2 <= hi) cross = c2;
            }
            out.found = true;
            out.refined = true;
            out.lambda_star = cross;
            MinimaCluster m = cluster_at(cross);
            out.minima = m.count() >= 2 ? std::move(m)
                                        : pair_cluster(g, a, J.value(a) + cross * Phi.value(a), b,
                                                       J.value(b) + cross * Phi.value(b), tol);
            return out;
        }
        prev = rep;
    }
    return out;
}

MinimaCluster restricted_minima(const ScalarField& F, const ScalarField& Phi, double rho, Tolerances tol) {
    same_domain(F, Phi, "restricted_minima");
    std::vector<char> mask(F.size());
    for (std::size_t i = 0; i < F.size(); ++i) mask[i] = Phi.value(i) <= rho;
    return minima_of_values(F.domain(), shifted(F, Phi, 1.0), tol, mask);
}

MultiplicityFinding scan_rho_star(const ScalarField& F, const ScalarField& Phi, const std::vector<double>& rho_grid,
                                  bool all_events, Tolerances tol) {
    same_domain(F, Phi, "scan_rho_star");
    if (rho_grid.empty()) fail(ErrorKind::InvalidArgument, "scan_rho_star: empty rho grid");
    for (std::size_t k = 1; k < rho_grid.size(); ++k) {
        if (!(rho_grid[k] > rho_grid[k - 1])) fail(ErrorKind::InvalidArgument, "scan_rho_star: rho grid must increase");
    }
    const GridSpec& g = F.domain();
    const double tol_sep = tol.tol_sep.value_or(g.default_tol_sep());
    const std::vector<double> v = shifted(F, Phi, 1.0);
    auto far = [&](std::size_t a, std::size_t b) { return distance(g.point(a), g.point(b)) >= tol_sep; };
    auto tol_val = [&](double m) { return tol.tol_val.value_or(default_tol_val(m)); };

    MultiplicityFinding out;
    out.context = MultiplicityFinding::Context::RhoScan;
    auto record = [&](double rho, MinimaCluster m) {
        if (!out.found) {
            out.found = true;
            out.rho_star = rho;
            out.minima = m;
        }
        if (all_events) out.events.push_back({rho, std::move(m)});
    };

    // Grid points enter the admissible set in increasing order of Phi.
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return Phi.value(a) < Phi.value(b); });

    const double rho0 = rho_grid.front();
    const double rho_last = rho_grid.back();
    std::size_t pos = 0;
    double best = kInf;
    std::size_t arg = 0;
    bool any = false;
    while (pos < order.size() && Phi.value(order[pos]) <= rho0) {
        const std::size_t i = order[pos++];
        if (!any || v[i] < best || (v[i] == best && lex_less(g.point(i), g.point(arg)))) {
            best = v[i];
            arg = i;
            any = true;
        }
    }
    if (any) {
        MinimaCluster c = restricted_minima(F, Phi, rho0, tol);
        if (c.count() >= 2) {
            record(rho0, c);
            if (!all_events) return out;
        }
        arg = c.indices[0];
        best = v[arg];
    }

    while (pos < order.size() && Phi.value(order[pos]) <= rho_last) {
        const double level = Phi.value(order[pos]);
        std::size_t group_best = order[pos];
        std::vector<std::size_t> group;
        while (pos < order.size() && Phi.value(order[pos]) == level) {
            const std::size_t i = order[pos++];
            group.push_back(i);
            if (v[i] < v[group_best] || (v[i] == v[group_best] && lex_less(g.point(i), g.point(group_best)))) group_best = i;
        }
        if (!any) {
            any = true;
            best = v[group_best];
            arg = group_best;
            continue;
        }
        const double new_min = std::min(best, v[group_best]);
        const double tv = tol_val(new_min);
        // Near-minimal points touched by this level: the previous leader and the new entrants.
        std::vector<std::size_t> near;
        if (best <= new_min + tv) near.push_back(arg);
        for (std::size_t i : group) {
            if (v[i] <= new_min + tv) near.push_back(i);
        }
        bool tie = false;
        for (std::size_t s = 0; s < near.size() && !tie; ++s) {
            for (std::size_t t = s + 1; t < near.size() && !tie; ++t) tie = far(near[s], near[t]);
        }
        if (tie) {
            MinimaCluster c = restricted_minima(F, Phi, level, tol);
            if (c.count() < 2) c = pair_cluster(g, arg, best, group_best, v[group_best], tol);
            record(level, std::move(c));
            if (!all_events) return out;
            arg = group_best;
            best = v[group_best];
            continue;
        }
        if (v[group_best] < best) {
            if (far(arg, group_best)) {
                // Leadership jumps to a far branch with no tie seen at this resolution.
                out.refined = true;
                record(level, pair_cluster(g, arg, best, group_best, v[group_best], tol));
                if (!all_events) return out;
            }
            arg = group_best;
            best = v[group_best];
        }
    }
    return out;
}

FarthestTie farthest_tie_point(const std::vector<Point>& points, std::size_t hull_grid_n) {
    if (points.size() < 2) fail(ErrorKind::InvalidArgument, "farthest_tie_point: needs at least two points");
    const std::size_t dim = points[0].size();
    for (const Point& p : points) {
        if (p.size() != dim) fail(ErrorKind::InvalidArgument, "farthest_tie_point: mixed dimensions");
    }
    double diam = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = i + 1; j < points.size(); ++j) diam = std::max(diam, distance(points[i], points[j]));
    }
    if (diam <= 0.0) fail(ErrorKind::InvalidArgument, "farthest_tie_point: needs at least two distinct points");

    const std::size_t k = points.size();
    // Cap the lattice at about 4e6 points.
    auto lattice_size = [&](std::size_t n) {
        double c = 1.0;
        for (std::size_t i = 1; i < k; ++i) c = c * static_cast<double>(n + i) / static_cast<double>(i);
        return c;
    };
    std::size_t N = std::max<std::size_t>(hull_grid_n, 1);
    while (N > 1 && lattice_size(N) > 4e6) N = N * 3 / 4;

    struct Best {
        double score = kInf;
        Point p;
    };
    // Enumerate compositions of N into k parts; the first weight is split across workers.
    const auto parts = parallel_chunks<Best>(N + 1, [&](std::size_t begin, std::size_t end) {
        Best b;
        std::vector<std::size_t> w(k, 0);
        Point p(dim);
        std::vector<double> d(k);
        auto visit = [&] {
            for (std::size_t c = 0; c < dim; ++c) {
                double s = 0.0;
                for (std::size_t i = 0; i < k; ++i) s += static_cast<double>(w[i]) * points[i][c];
                p[c] = s / static_cast<double>(N);
            }
            double d1 = -kInf, d2 = -kInf;
            for (std::size_t i = 0; i < k; ++i) {
                const double di = distance(p, points[i]);
                if (di > d1) {
                    d2 = d1;
                    d1 = di;
                } else if (di > d2) {
                    d2 = di;
                }
            }
            // Smallest farthest distance, with the tie gap as a penalty.
            const double score = 2.0 * d1 - d2;
            if (score < b.score) {
                b.score = score;
                b.p = p;
            }
        };
        // Recursive enumeration with an explicit stack over positions 1..k-1.
        for (std::size_t w0 = begin; w0 < end; ++w0) {
            w.assign(k, 0);
            w[0] = w0;
            const std::size_t rest = N - w0;
            if (k == 1) continue;
            if (k == 2) {
                w[1] = rest;
                visit();
                continue;
            }
            // Odometer over w[1..k-2]; w[k-1] takes the remainder.
            std::size_t pos = 1;
            w[1] = 0;
            while (true) {
                std::size_t sum = 0;
                for (std::size_t i = 1; i + 1 < k; ++i) sum += w[i];
                if (sum <= rest) {
                    w[k - 1] = rest - sum;
                    visit();
                }
                pos = k - 2;
                while (pos >= 1) {
                    std::size_t partial = 0;
                    for (std::size_t i = 1; i < pos; ++i) partial += w[i];
                    if (w[pos] + partial < rest) {
                        ++w[pos];
                        for (std::size_t i = pos + 1; i + 1 < k; ++i) w[i] = 0;
                        break;
                    }
                    --pos;
                }
                if (pos == 0) break;
            }
        }
        return b;
    }, 1);

    Best best;
    for (const Best& b : parts) {
        if (b.score < best.score) best = b;
    }
    FarthestTie out;
    out.point = best.p;
    out.lattice_n = N;
    out.tie_tol = 2.0 * diam / static_cast<double>(N);
    double d1 = -kInf;
    for (const Point& q : points) {
        out.distances.push_back(distance(best.p, q));
        d1 = std::max(d1, out.distances.back());
    }
    double d2 = -kInf;
    for (std::size_t i = 0; i < k; ++i) {
        if (out.distances[i] >= d1 - out.tie_tol) out.tied.push_back(i);
    }
    std::vector<double> sorted = out.distances;
    std::sort(sorted.rbegin(), sorted.rend());
    d2 = sorted.size() > 1 ? sorted[1] : d1;
    out.tie_gap = d1 - d2;
    return out;
}

std::pair<double, double> eta_estimate(const ScalarField& J) {
    const GridSpec& g = J.domain();
    double max_norm = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Point x = g.point(i);
        max_norm = std::max(max_norm, std::sqrt(std::inner_product(x.begin(), x.end(), x.begin(), 0.0)));
    }
    const double shell = 0.9 * max_norm;
    double eta = kInf;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Point x = g.point(i);
        const double n2 = std::inner_product(x.begin(), x.end(), x.begin(), 0.0);
        if (n2 > 0.0 && std::sqrt(n2) >= shell) eta = std::min(eta, J.value(i) / n2);
    }
    return {eta, shell};
}

MultiplicityFinding three_solutions_1d(const ScalarField& J, double mu, std::vector<double> y_scan, Tolerances tol) {
    const GridSpec& g = J.domain();
    if (g.dim() != 1 || g.kind() != GridSpec::Kind::Uniform) {
        fail(ErrorKind::InvalidArgument, "three_solutions_1d: J must live on a uniform 1-D grid");
    }
    const strict::ThetaResult th =
        strict::theta_quadratic(J, [](std::span<const double> x) { return Point(x.begin(), x.end()); }, tol);
    const auto [eta, shell] = eta_estimate(J);
    const double theta = th.theta.to_double();
    if (!(mu > 2.0 * theta && mu < 2.0 * eta)) {
        fail(ErrorKind::RangeError, "three_solutions_1d: mu outside ]2 theta, 2 eta[",
             "mu = " + num(mu) + ", theta = " + th.theta.to_string() + ", eta = " + num(eta) + " (shell |x| >= " +
                 num(shell) + ")");
    }

    // J(x) - mu/2 (x - lambda)^2 = [J(x) - mu/2 x^2] + lambda (mu x) - mu/2 lambda^2.
    auto tilt_fn = [J, mu](std::span<const double> x) { return J.eval(x) - 0.5 * mu * x[0] * x[0]; };
    std::vector<double> tv(J.size()), pv(J.size());
    for (std::size_t i = 0; i < J.size(); ++i) {
        const double x = g.coord(i, 0);
        tv[i] = J.value(i) - 0.5 * mu * x * x;
        pv[i] = mu * x;
    }
    const ScalarField Jt = J.has_evaluator() ? ScalarField::from_function(g, tilt_fn, "J - mu/2 x^2")
                                             : ScalarField::from_values(g, tv, "J - mu/2 x^2");
    const ScalarField Pt = ScalarField::from_values(g, pv, "mu x");

    if (y_scan.empty()) {
        const double R = std::max(std::abs(g.lo()[0]), std::abs(g.hi()[0]));
        y_scan = linspace(-mu * R, mu * R, 401);
    }
    std::vector<double> lambdas;
    for (double y : y_scan) lambdas.push_back(-y / mu);
    std::sort(lambdas.begin(), lambdas.end());
    lambdas.erase(std::unique(lambdas.begin(), lambdas.end()), lambdas.end());

    MultiplicityFinding out = find_lambda_star(Jt, Pt, lambdas, tol);
    out.context = MultiplicityFinding::Context::ThreeSolutions;
    out.theta = theta;
    out.eta = eta;
    out.eta_shell = shell;
    if (!out.found) {
        fail(ErrorKind::RootCountShortfall, "three_solutions_1d: no multiplier with two global minima on the y scan");
    }
    // Critical points of x -> J(x) - mu/2 (x - lambda*)^2 solve J'(x) - mu x = -mu lambda*.
    const double y_mu = -mu * *out.lambda_star;
    out.y_mu = y_mu;

    const auto& ax = g.axis(0);
    const double h = ax[1] - ax[0];
    auto F_at = [&](double x) {
        const double xp[1] = {x + h}, xm[1] = {x - h};
        return (J.eval(xp) - J.eval(xm)) / (2.0 * h) - mu * x - y_mu;
    };
    std::vector<double> Fv(ax.size(), 0.0);
    for (std::size_t i = 1; i + 1 < ax.size(); ++i) {
        Fv[i] = (J.value(i + 1) - J.value(i - 1)) / (2.0 * h) - mu * ax[i] - y_mu;
    }
    const double dead = 1e-12;
    std::optional<std::size_t> last;  // last interior index with |F| above the dead band
    for (std::size_t i = 1; i + 1 < ax.size(); ++i) {
        if (std::abs(Fv[i]) <= dead) continue;
        if (last && (Fv[*last] > 0.0) != (Fv[i] > 0.0)) {
            double lo = ax[*last], hi = ax[i];
            double root;
            if (J.has_evaluator()) {
                const bool lo_pos = F_at(lo) > 0.0;
                for (int it = 0; it < 200; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    if (mid <= lo || mid >= hi) break;
                    ((F_at(mid) > 0.0) == lo_pos ? lo : hi) = mid;
                }
                root = 0.5 * (lo + hi);
            } else {
                const double f0 = Fv[*last], f1 = Fv[i];
                root = lo + (hi - lo) * f0 / (f0 - f1);
            }
            out.roots.push_back(root);
        }
        last = i;
    }
    const double tol_sep = tol.tol_sep.value_or(g.default_tol_sep());
    bool separated = true;
    for (std::size_t k = 1; k < out.roots.size(); ++k) separated = separated && out.roots[k] - out.roots[k - 1] >= tol_sep;
    if (out.roots.size() < 3 || !separated) {
        std::string listed;
        for (double r : out.roots) listed += (listed.empty() ? "" : ", ") + num(r);
        fail(ErrorKind::RootCountShortfall,
             "three_solutions_1d: found " + std::to_string(out.roots.size()) + " separated roots, expected at least 3",
             "y_mu = " + num(y_mu) + ", roots = [" + listed + "]");
    }
    return out;
}

}  // namespace mmlab::multiplicity
