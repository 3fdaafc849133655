#include "mmlab/spherical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "mmlab/error.hpp"
#include "mmlab/parallel.hpp"

namespace mmlab::spherical {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double norm2(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

bool inside(const GridSpec& g, std::span<const double> x) {
    if (g.kind() == GridSpec::Kind::Explicit) return true;
    for (std::size_t d = 0; d < x.size(); ++d) {
        if (x[d] < g.lo()[d] || x[d] > g.hi()[d]) return false;
    }
    return true;
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    return v[mid];
}

// Central-difference gradient of Psi; grid differences for table-backed fields.
Point gradient(const ScalarField& psi, const Point& x) {
    const std::size_t dim = x.size();
    Point grad(dim, 0.0);
    if (psi.has_evaluator()) {
        for (std::size_t d = 0; d < dim; ++d) {
            const double s = 1e-6 * (1.0 + std::abs(x[d]));
            Point lo = x, hi = x;
            lo[d] -= s;
            hi[d] += s;
            grad[d] = (psi.eval(hi) - psi.eval(lo)) / (2.0 * s);
        }
        return grad;
    }
    const GridSpec& g = psi.domain();
    const std::size_t i = g.nearest_index(x);
    const auto idx = g.unravel(i);
    for (std::size_t d = 0; d < dim && g.kind() == GridSpec::Kind::Uniform; ++d) {
        auto lo = idx, hi = idx;
        if (lo[d] > 0) --lo[d];
        if (hi[d] + 1 < g.counts()[d]) ++hi[d];
        if (lo[d] == hi[d]) continue;
        const double dx = g.axis(d)[hi[d]] - g.axis(d)[lo[d]];
        grad[d] = (psi.value(g.ravel(hi)) - psi.value(g.ravel(lo))) / dx;
    }
    return grad;
}

}  // namespace

SphericalProblem::SphericalProblem(ScalarField psi, SphericalOptions opts) : psi_(std::move(psi)), opts_(std::move(opts)) {
    const GridSpec& g = psi_.domain();
    const Point zero(g.dim(), 0.0);
    double psi0 = kNaN;
    if (psi_.has_evaluator()) {
        psi0 = psi_.eval(zero);
    } else {
        const std::size_t i0 = g.nearest_index(zero);
        if (norm2(g.point(i0)) <= 1e-24) psi0 = psi_.value(i0);
    }
    if (!(std::abs(psi0) <= 1e-9)) {
        fail(ErrorKind::Validation, "spherical: Psi(0) must vanish", "Psi(0) = " + ExtendedReal(psi0).to_string());
    }

    double max_norm = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) max_norm = std::max(max_norm, std::sqrt(norm2(g.point(i))));
    double sigma = -std::numeric_limits<double>::infinity();
    double rho = -std::numeric_limits<double>::infinity();
    bool any_nonzero = false;
    Point x(g.dim());
    for (std::size_t i = 0; i < g.size(); ++i) {
        g.point_into(i, x);
        const double n2 = norm2(x);
        if (psi_.value(i) != 0.0) any_nonzero = true;
        if (n2 <= 0.0) continue;
        const double q = psi_.value(i) / n2;
        sigma = std::max(sigma, q);
        if (std::sqrt(n2) >= 0.9 * max_norm) rho = std::max(rho, q);
    }
    sigma_ = std::isfinite(sigma) ? sigma : 0.0;
    rho_ = std::isfinite(rho) ? rho : 0.0;
    a_ = opts_.a.value_or(std::max(0.0, rho_));
    b_ = opts_.b.value_or(ExtendedReal(sigma_));
    if (!any_nonzero || !(ExtendedReal(a_) < b_)) {
        if (!any_nonzero) {
            degenerate_ = true;
            return;
        }
        fail(ErrorKind::Validation, "spherical: need a < b",
             "a = " + ExtendedReal(a_).to_string() + ", b = " + b_.to_string());
    }

    ScalarField J = psi_.has_evaluator()
                        ? ScalarField::from_function(
                              g, [p = psi_](std::span<const double> y) { return -p.eval(y); }, "-Psi")
                        : [&] {
                              std::vector<double> v(psi_.values().begin(), psi_.values().end());
                              for (double& t : v) t = -t;
                              return ScalarField::from_values(g, std::move(v), "-Psi");
                          }();
    ScalarField Phi = ScalarField::from_function(g, [](std::span<const double> y) { return norm2(y); }, "|x|^2");
    path_.emplace(std::move(J), std::move(Phi), ExtendedReal(a_), b_, opts_.tol);
}

double SphericalProblem::fd_step(double r) const { return opts_.fd_step.value_or(1e-3 * (1.0 + std::abs(r))); }

std::vector<GRow> trace_g(const SphericalProblem& p, const std::vector<double>& lambdas) {
    std::vector<GRow> rows;
    for (double lam : lambdas) {
        GRow row;
        row.lambda = lam;
        if (p.degenerate()) {
            row.y = Point(p.psi().domain().dim(), 0.0);
        } else {
            try {
                const auto res = path::inner_minimize(p.path_problem(), lam);
                row.g = res.Phi;
                row.y = res.point;
            } catch (const Error& e) {
                row.error = e.what();
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::pair<double, Point> sphere_sup(const ScalarField& psi, double r, std::size_t samples, std::uint64_t seed) {
    const GridSpec& g = psi.domain();
    const std::size_t dim = g.dim();
    const double rad = std::sqrt(std::max(r, 0.0));
    double best = -std::numeric_limits<double>::infinity();
    Point arg;
    auto consider = [&](const Point& x) {
        if (!inside(g, x)) return;
        const double v = psi.eval(x);
        if (v > best) {
            best = v;
            arg = x;
        }
    };
    if (dim == 1) {
        consider({-rad});
        consider({rad});
    } else if (dim == 2) {
        for (std::size_t k = 0; k < samples; ++k) {
            const double t = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(samples);
            consider({rad * std::cos(t), rad * std::sin(t)});
        }
    } else {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> normal;
        Point x(dim);
        for (std::size_t k = 0; k < samples; ++k) {
            for (double& c : x) c = normal(rng);
            const double n = std::sqrt(norm2(x));
            if (n == 0.0) continue;
            for (double& c : x) c *= rad / n;
            consider(x);
        }
    }
    if (!std::isfinite(best)) return {kNaN, {}};
    return {best, arg};
}

std::vector<GammaRow> gamma_and_derivative(const SphericalProblem& p, const std::vector<double>& r_grid) {
    std::vector<GammaRow> rows(r_grid.size());
    if (p.degenerate()) {
        for (std::size_t k = 0; k < rows.size(); ++k) {
            rows[k].r = r_grid[k];
            rows[k].error_kind = "RangeError";
            rows[k].error = "degenerate problem: Psi vanishes";
        }
        return rows;
    }
    const auto& prob = p.path_problem();
    const path::AlphaBeta ab = path::alpha_beta(prob);
    const auto& opts = p.options();

    auto gamma_at = [&](double r) { return -path::solve_constrained(prob, r).J_value; };
    auto in_range = [&](double r) { return ab.alpha < ExtendedReal(r) && ExtendedReal(r) < ab.beta; };

    parallel_chunks<int>(
        r_grid.size(),
        [&](std::size_t begin, std::size_t end) {
            for (std::size_t k = begin; k < end; ++k) {
                GammaRow& row = rows[k];
                const double r = r_grid[k];
                row.r = r;
                try {
                    const auto cert = path::solve_constrained(prob, r);
                    row.lambda_hat = cert.lambda_hat;
                    row.x_hat = cert.x_hat;
                    row.gamma = -cert.J_value;
                    const double h = p.fd_step(r);
                    if (in_range(r - h) && in_range(r + h)) {
                        row.gamma_prime = (gamma_at(r + h) - gamma_at(r - h)) / (2.0 * h);
                    } else if (in_range(r + 2.0 * h)) {
                        row.gamma_prime = (-3.0 * row.gamma + 4.0 * gamma_at(r + h) - gamma_at(r + 2.0 * h)) / (2.0 * h);
                    } else {
                        row.gamma_prime = (3.0 * row.gamma - 4.0 * gamma_at(r - h) + gamma_at(r - 2.0 * h)) / (2.0 * h);
                    }
                    auto [sup, arg] = sphere_sup(p.psi(), r, opts.sphere_samples, opts.seed + k);
                    row.sphere_sup = sup;
                    row.sphere_argmax = std::move(arg);
                    const Point grad = gradient(p.psi(), row.x_hat);
                    double res2 = 0.0;
                    for (std::size_t d = 0; d < grad.size(); ++d) {
                        const double e = grad[d] - 2.0 * row.gamma_prime * row.x_hat[d];
                        res2 += e * e;
                    }
                    row.euler_residual = std::sqrt(res2);
                } catch (const Error& e) {
                    row.error_kind = std::string(to_string(e.kind()));
                    row.error = e.what();
                }
            }
            return 0;
        },
        1);
    return rows;
}

bool SphericalReport::all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& kv) { return kv.second.passed; });
}

SphericalReport verify_relations(const SphericalProblem& p, const std::vector<double>& r_grid) {
    SphericalReport rep;
    rep.a = p.a();
    rep.b = p.b();
    rep.rho_estimate = p.rho_estimate();
    rep.sigma_estimate = p.sigma_estimate();
    rep.degenerate = p.degenerate();
    rep.notes.push_back("conclusions verified / hypotheses assumed");
    const char* names[] = {"a1", "a2", "a3", "a4", "a5", "a6", "a7"};
    if (p.degenerate()) {
        rep.alpha = 0.0;
        rep.beta = 0.0;
        rep.notes.push_back("Psi vanishes on the grid: beta = 0, the r range is empty");
        for (const char* n : names) rep.checks[n] = Check{true, 0.0, "vacuous"};
        return rep;
    }
    const auto& prob = p.path_problem();
    const path::AlphaBeta ab = path::alpha_beta(prob);
    rep.alpha = ab.alpha;
    rep.beta = ab.beta;

    std::vector<double> sorted_r = r_grid;
    std::sort(sorted_r.begin(), sorted_r.end());
    rep.gamma_table = gamma_and_derivative(p, sorted_r);

    std::vector<double> lambdas;
    if (p.b().is_finite()) {
        for (int k = 1; k <= 21; ++k) lambdas.push_back(p.a() + (p.b().value() - p.a()) * k / 22.0);
    } else {
        for (const auto& row : rep.gamma_table) {
            if (row.ok()) lambdas.push_back(row.lambda_hat);
        }
        std::sort(lambdas.begin(), lambdas.end());
        lambdas.erase(std::unique(lambdas.begin(), lambdas.end()), lambdas.end());
    }
    rep.g_table = trace_g(p, lambdas);

    std::vector<const GammaRow*> ok;
    std::size_t failed = 0;
    std::string first_error;
    for (const auto& row : rep.gamma_table) {
        if (row.ok()) {
            ok.push_back(&row);
        } else if (failed++ == 0) {
            first_error = row.error_kind + ": " + row.error;
        }
    }
    for (const auto& row : rep.g_table) {
        if (!row.error.empty() && failed++ == 0) first_error = row.error;
    }
    if (failed > 0) {
        rep.notes.push_back(std::to_string(failed) + " table entries failed; first: " + first_error);
        if (first_error.find("global minima") != std::string::npos) {
            rep.notes.push_back("non-unique minima: restrict the grid to a half-line or half-space to break the symmetry");
        }
        for (const char* n : names) rep.checks[n] = Check{false, 0.0, "table entries failed"};
        return rep;
    }

    // (a1) gamma > 0 for every table r above alpha; r* bracketed by the sign change.
    {
        Check c{true, std::numeric_limits<double>::infinity(), ""};
        rep.r_star_lo = 0.0;
        rep.r_star_hi = std::numeric_limits<double>::infinity();
        for (const GammaRow* row : ok) {
            if (row->gamma <= 0.0) rep.r_star_lo = std::max(rep.r_star_lo, row->r);
            else rep.r_star_hi = std::min(rep.r_star_hi, row->r);
            if (ab.alpha < ExtendedReal(row->r)) {
                c.margin = std::min(c.margin, row->gamma);
                if (row->gamma <= 0.0) c.passed = false;
            }
        }
        if (ok.empty()) c.margin = 0.0;
        c.detail = "gamma > 0 above alpha";
        rep.checks["a1"] = c;
    }
    // (a2) g strictly decreasing.
    {
        Check c{true, std::numeric_limits<double>::infinity(), "g strictly decreasing"};
        for (std::size_t k = 1; k < rep.g_table.size(); ++k) {
            const double drop = rep.g_table[k - 1].g - rep.g_table[k].g;
            c.margin = std::min(c.margin, drop);
            if (!(drop > 0.0)) c.passed = false;
        }
        if (rep.g_table.size() < 2) c.margin = 0.0;
        rep.checks["a2"] = c;
    }
    // (a3) the path maximiser agrees with dense sphere sampling.
    {
        Check c{true, std::numeric_limits<double>::infinity(), "gamma matches dense sphere sampling"};
        const bool exact = p.psi().domain().dim() == 1;
        for (const GammaRow* row : ok) {
            const double tol = p.options().gamma_tol * (1.0 + std::abs(row->gamma));
            if (!std::isfinite(row->sphere_sup)) {
                c.passed = false;
                c.detail = "sphere outside the grid box";
                continue;
            }
            const double over = row->sphere_sup - row->gamma;  // sampling cannot beat the true sup
            const double dev = exact ? std::abs(over) : std::max(over, 0.0);
            c.margin = std::min(c.margin, tol - dev);
            if (dev > tol) c.passed = false;
        }
        if (ok.empty()) c.margin = 0.0;
        rep.checks["a3"] = c;
    }
    // (a4) r -> x_r has no outsized jumps.
    {
        std::vector<double> steps;
        for (std::size_t k = 1; k < ok.size(); ++k) steps.push_back(distance(ok[k - 1]->x_hat, ok[k]->x_hat));
        const double bound = 10.0 * median(steps) + 2.0 * p.psi().domain().spacing();
        const double worst = steps.empty() ? 0.0 : *std::max_element(steps.begin(), steps.end());
        rep.checks["a4"] = Check{worst <= bound, bound - worst, "max step of x_r within 10 x median + 2 x spacing"};
    }
    // (a5) gamma increasing and strictly midpoint-concave.
    {
        Check c{true, std::numeric_limits<double>::infinity(), "gamma increasing and strictly concave"};
        for (std::size_t k = 1; k < ok.size(); ++k) {
            if (!(ok[k]->gamma > ok[k - 1]->gamma)) c.passed = false;
        }
        for (std::size_t k = 1; k + 1 < ok.size(); ++k) {
            const double r0 = ok[k - 1]->r, r1 = ok[k]->r, r2 = ok[k + 1]->r;
            const double t = (r1 - r0) / (r2 - r0);
            const double chord = (1.0 - t) * ok[k - 1]->gamma + t * ok[k + 1]->gamma;
            const double m = ok[k]->gamma - chord;
            c.margin = std::min(c.margin, m);
            if (!(m > 0.0)) c.passed = false;
        }
        if (ok.size() < 3) c.margin = 0.0;
        rep.checks["a5"] = c;
    }
    // (a6) Euler relation Psi'(x_r) = 2 gamma'(r) x_r.
    {
        double worst = 0.0;
        for (const GammaRow* row : ok) worst = std::max(worst, row->euler_residual);
        rep.checks["a6"] = Check{worst <= p.options().euler_tol, p.options().euler_tol - worst, "max Euler residual"};
    }
    // (a7) gamma' equals the multiplier.
    {
        double worst = 0.0;
        for (const GammaRow* row : ok) worst = std::max(worst, std::abs(row->gamma_prime - row->lambda_hat));
        rep.checks["a7"] = Check{worst <= p.options().a7_tol, p.options().a7_tol - worst, "max |gamma' - g^{-1}(r)|"};
    }
    return rep;
}

}  // namespace mmlab::spherical
