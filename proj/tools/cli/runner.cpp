#include "runner.hpp"

#include <cmath>

#include "mmlab/error.hpp"
#include "mmlab/expr.hpp"
#include "mmlab/integral.hpp"
#include "mmlab/minimax.hpp"
#include "mmlab/multiplicity.hpp"
#include "mmlab/multiplier_path.hpp"
#include "mmlab/serialize.hpp"
#include "mmlab/spherical.hpp"
#include "mmlab/strict_minimax.hpp"

namespace mmlab::cli {

using nlohmann::json;

namespace {

struct Ctx {
    const RunConfig& c;
    int exit_code = 0;

    const json& param(const std::string& key) const {
        if (!c.params.contains(key)) fail(ErrorKind::Validation, "config: missing parameter '" + key + "'", "at $.params");
        return c.params.at(key);
    }
    double real(const std::string& key) const { return param(key).get<double>(); }
    double real(const std::string& key, double fallback) const {
        return c.params.contains(key) ? c.params.at(key).get<double>() : fallback;
    }
    std::size_t count(const std::string& key, std::size_t fallback) const {
        return c.params.contains(key) ? c.params.at(key).get<std::size_t>() : fallback;
    }
    bool flag(const std::string& key, bool fallback) const {
        return c.params.contains(key) ? c.params.at(key).get<bool>() : fallback;
    }
    ExtendedReal extended(const std::string& key, ExtendedReal fallback) const {
        return c.params.contains(key) ? extended_from_json(c.params.at(key)) : fallback;
    }
    std::vector<double> reals(const std::string& key) const { return param(key).get<std::vector<double>>(); }
    std::optional<double> tolerance(const std::string& key) const {
        const auto it = c.tolerances.find(key);
        if (it == c.tolerances.end()) return std::nullopt;
        return it->second;
    }
    Tolerances tol() const { return {tolerance("tol_val"), tolerance("tol_sep")}; }
    GridSpec domain() const { return grid_from_json(*c.domain); }
    ScalarField field(const std::string& key) const { return ScalarField::from_expression(domain(), c.expressions.at(key)); }
    std::vector<double> range(const std::string& from, const std::string& to, const std::string& steps) const {
        const std::size_t n = count(steps, 0);
        if (n == 0) fail(ErrorKind::Validation, "config: '" + steps + "' must be at least 1", "at $.params." + steps);
        if (n == 1) return {real(from)};
        return linspace(real(from), real(to), n);
    }
    void finding() { exit_code = 2; }
};

// Doubles that may be infinite use the same "+inf" / "-inf" strings as extended reals.
json real_json(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "+inf" : "-inf";
}

json optional_cluster(const std::optional<MinimaCluster>& m) { return m ? to_json(*m) : json(nullptr); }

json certificate_json(const path::WellPosedCertificate& c) {
    return {{"r", c.r},
            {"lambda_hat", c.lambda_hat},
            {"lambda_lo", c.lambda_lo},
            {"lambda_hi", c.lambda_hi},
            {"x_hat", point_json(c.x_hat)},
            {"J_value", c.J_value},
            {"phi_value", c.phi_value},
            {"phi_residual", c.phi_residual},
            {"residual_tol", c.residual_tol},
            {"unique", c.unique},
            {"iterations", c.iterations},
            {"band", c.band},
            {"band_min_J", real_json(c.band_min_J)},
            {"cross_tol", c.cross_tol},
            {"cross_check_passed", c.cross_check_passed},
            {"dual", c.dual}};
}

json alpha_beta_json(const path::AlphaBeta& ab) {
    return {{"alpha", to_json(ab.alpha)},
            {"beta", to_json(ab.beta)},
            {"M_a", optional_cluster(ab.M_a)},
            {"M_b", optional_cluster(ab.M_b)},
            {"ordered", ab.ordered}};
}

json points_json(const GridSpec& g, const std::vector<std::size_t>& idx) {
    json out = json::array();
    for (std::size_t i : idx) out.push_back(point_json(g.point(i)));
    return out;
}

json run_minimax(Ctx& ctx) {
    const GridSpec x = ctx.domain();
    const GridSpec y = grid_from_json(*ctx.c.y_domain);
    const BivariateField f = ctx.c.table ? BivariateField::from_table(x, y, *ctx.c.table)
                                         : BivariateField::from_expression(x, y, ctx.c.expressions.at("f"));
    minimax::ClassifyOptions opts;
    opts.gap_tol = ctx.tolerance("gap_tol");
    opts.tol = ctx.tol();
    const minimax::MinimaxReport r = minimax::classify_alternative(f, opts);
    json out = {{"sup_inf", r.sup_inf},
                {"inf_sup", r.inf_sup},
                {"gap", r.gap},
                {"gap_tol", r.gap_tol},
                {"gap_closed", r.gap_closed},
                {"alternative", minimax::to_string(r.alternative)},
                {"sup_inf_y", point_json(y.point(r.sup_inf_y_index))},
                {"inf_sup_x", point_json(x.point(r.inf_sup_x_index))},
                {"witness", nullptr},
                {"diagnostic", nullptr}};
    if (r.two_minima) {
        const auto& w = *r.two_minima;
        out["witness"] = {{"y_hat", point_json(w.y_hat)},
                          {"y_index", w.y_index},
                          {"interpolated", w.interpolated},
                          {"minima", to_json(w.minima)}};
    }
    if (r.diagnostic) {
        const auto& d = *r.diagnostic;
        out["diagnostic"] = {{"kind", minimax::to_string(d.kind)},
                             {"x", point_json(x.point(d.x_index))},
                             {"y", points_json(y, d.y_indices)},
                             {"values", d.values},
                             {"message", d.message}};
    }
    return out;
}

path::MultiplierProblem path_problem(const Ctx& ctx) {
    path::MultiplierProblem p(ctx.field("J"), ctx.field("Phi"), ctx.extended("a", 0.0),
                              ctx.extended("b", ExtendedReal::pos_inf()), ctx.tol());
    p.set_polish(ctx.flag("polish", true));
    return p;
}

path::SolveOptions solve_options(const Ctx& ctx) {
    path::SolveOptions o;
    o.bisect_tol = ctx.tolerance("bisect_tol");
    return o;
}

json run_path_solve(Ctx& ctx) {
    const path::MultiplierProblem p = path_problem(ctx);
    const double r = ctx.real("r");
    const bool dual = ctx.flag("dual", false);
    const auto cert = dual ? path::solve_dual(p, r, solve_options(ctx)) : path::solve_constrained(p, r, solve_options(ctx));
    json out = certificate_json(cert);
    if (!dual) out["alpha_beta"] = alpha_beta_json(path::alpha_beta(p));
    return out;
}

bool hypothesis_kind(const std::string& kind) {
    for (int k = 0; k <= static_cast<int>(ErrorKind::Parse); ++k) {
        const auto e = static_cast<ErrorKind>(k);
        if (kind == to_string(e)) return is_hypothesis_failure(e);
    }
    return false;
}

json run_path_scan(Ctx& ctx) {
    const path::MultiplierProblem p = path_problem(ctx);
    const auto rs = ctx.range("r_from", "r_to", "steps");
    json entries = json::array();
    for (const auto& e : path::scan_path(p, rs, solve_options(ctx))) {
        json row = {{"r", e.r}};
        if (e.certificate) {
            row["certificate"] = certificate_json(*e.certificate);
        } else {
            row["error"] = {{"kind", e.error_kind}, {"message", e.error}};
            if (hypothesis_kind(e.error_kind)) ctx.finding();
        }
        entries.push_back(row);
    }
    return {{"alpha_beta", alpha_beta_json(path::alpha_beta(p))}, {"entries", entries}};
}

json run_spherical(Ctx& ctx) {
    spherical::SphericalOptions o;
    if (ctx.c.params.contains("a")) o.a = ctx.real("a");
    if (ctx.c.params.contains("b")) o.b = ctx.extended("b", ExtendedReal::pos_inf());
    if (ctx.c.params.contains("fd_step")) o.fd_step = ctx.real("fd_step");
    o.sphere_samples = ctx.count("sphere_samples", o.sphere_samples);
    o.seed = ctx.count("seed", o.seed);
    o.a7_tol = ctx.tolerance("a7_tol").value_or(o.a7_tol);
    o.euler_tol = ctx.tolerance("euler_tol").value_or(o.euler_tol);
    o.gamma_tol = ctx.tolerance("gamma_tol").value_or(o.gamma_tol);
    o.tol = ctx.tol();
    const spherical::SphericalProblem p(ctx.field("Psi"), o);
    const auto rep = spherical::verify_relations(p, ctx.range("r_from", "r_to", "steps"));
    json g = json::array();
    for (const auto& row : rep.g_table) {
        json j = {{"lambda", row.lambda}, {"g", row.g}, {"y", point_json(row.y)}};
        if (!row.error.empty()) j["error"] = row.error;
        g.push_back(j);
    }
    json gamma = json::array();
    for (const auto& row : rep.gamma_table) {
        json j = {{"r", row.r}};
        if (row.ok()) {
            j.update({{"lambda_hat", row.lambda_hat},
                      {"x_hat", point_json(row.x_hat)},
                      {"gamma", row.gamma},
                      {"gamma_prime", row.gamma_prime},
                      {"sphere_sup", row.sphere_sup},
                      {"sphere_argmax", point_json(row.sphere_argmax)},
                      {"euler_residual", row.euler_residual}});
        } else {
            j["error"] = {{"kind", row.error_kind}, {"message", row.error}};
        }
        gamma.push_back(j);
    }
    json checks = json::object();
    for (const auto& [name, ch] : rep.checks) {
        checks[name] = {{"passed", ch.passed}, {"margin", real_json(ch.margin)}, {"detail", ch.detail}};
    }
    if (!rep.all_passed()) ctx.finding();
    return {{"a", rep.a},
            {"b", to_json(rep.b)},
            {"rho_estimate", rep.rho_estimate},
            {"sigma_estimate", rep.sigma_estimate},
            {"alpha", to_json(rep.alpha)},
            {"beta", to_json(rep.beta)},
            {"degenerate", rep.degenerate},
            {"r_star", {rep.r_star_lo, rep.r_star_hi}},
            {"checks", checks},
            {"all_passed", rep.all_passed()},
            {"g_table", g},
            {"gamma_table", gamma},
            {"notes", rep.notes}};
}

json sides_json(const strict::MemberSides& s) { return {{"member", s.member}, {"lhs", s.lhs}, {"rhs", s.rhs}}; }

json run_theta(Ctx& ctx) {
    const ScalarField J = ctx.field("J");
    strict::PointFn map = [](std::span<const double> x) { return Point(x.begin(), x.end()); };
    if (ctx.c.expressions.count("Phi")) {
        auto e = std::make_shared<Expression>(Expression::parse(ctx.c.expressions.at("Phi"), J.domain().dim()));
        map = [e](std::span<const double> x) { return Point{(*e)(x)}; };
    }
    strict::ThetaProblem p = strict::quadratic_problem(J, map, ctx.tol());
    p.lambda_sep = ctx.tolerance("lambda_sep").value_or(p.lambda_sep);
    p.phi_floor = ctx.tolerance("phi_floor").value_or(p.phi_floor);
    const strict::ThetaResult th = strict::theta(p);
    const GridSpec& g = J.domain();
    json out = {{"theta", to_json(th.theta)},
                {"u", th.u_index ? point_json(g.point(*th.u_index)) : json(nullptr)},
                {"x", th.x_index ? point_json(g.point(*th.x_index)) : json(nullptr)},
                {"pairs", th.pairs},
                {"skipped_pairs", th.skipped},
                {"minima", to_json(th.minima)}};
    if (ctx.c.params.contains("mu")) {
        const double mu = ctx.real("mu");
        const strict::Cover cover = strict::whole_cover(g.size());
        if (ExtendedReal(mu) > th.theta) {
            const strict::GapWitness w = strict::strict_gap_witness(p, mu, cover);
            out["strict_gap"] = {{"mu", mu},
                                 {"sides", sides_json(w.sides)},
                                 {"u", point_json(g.point(w.u_index))},
                                 {"x1", point_json(g.point(w.x1_index))}};
        } else {
            const strict::LowerBoundReport lb = strict::check_theta_lower_bound(p, mu, cover);
            json members = json::array();
            for (const auto& m : lb.members) members.push_back(sides_json(m));
            out["lower_bound"] = {{"mu", mu}, {"holds", lb.holds}, {"members", members}};
            if (!lb.holds) ctx.finding();
        }
    }
    return out;
}

json finding_json(const multiplicity::MultiplicityFinding& f) {
    json out = {{"context", multiplicity::to_string(f.context)},
                {"found", f.found},
                {"refined", f.refined},
                {"lambda_star", f.lambda_star ? json(*f.lambda_star) : json(nullptr)},
                {"rho_star", f.rho_star ? json(*f.rho_star) : json(nullptr)},
                {"minima", f.found ? to_json(f.minima) : json(nullptr)}};
    if (!f.events.empty()) {
        json ev = json::array();
        for (const auto& e : f.events) ev.push_back({{"rho", e.rho}, {"minima", to_json(e.minima)}});
        out["events"] = ev;
    }
    if (f.context == multiplicity::MultiplicityFinding::Context::ThreeSolutions) {
        out["y_mu"] = f.y_mu ? json(*f.y_mu) : json(nullptr);
        out["roots"] = f.roots;
        out["theta"] = real_json(f.theta);
        out["eta"] = real_json(f.eta);
        out["eta_shell"] = f.eta_shell;
    }
    return out;
}

json run_multiplicity(Ctx& ctx, const std::string& sub) {
    if (sub == "scan-rho") {
        return finding_json(multiplicity::scan_rho_star(ctx.field("F"), ctx.field("Phi"),
                                                        ctx.range("rho_from", "rho_to", "steps"),
                                                        ctx.flag("all_events", false), ctx.tol()));
    }
    if (sub == "find-lambda") {
        return finding_json(multiplicity::find_lambda_star(ctx.field("J"), ctx.field("Phi"),
                                                           ctx.range("lambda_from", "lambda_to", "steps"), ctx.tol()));
    }
    if (sub == "farthest-tie") {
        const auto pts = ctx.param("points").get<std::vector<Point>>();
        const auto t = multiplicity::farthest_tie_point(pts, ctx.count("hull_grid_n", 300));
        return {{"point", point_json(t.point)},
                {"tied", t.tied},
                {"distances", t.distances},
                {"tie_gap", t.tie_gap},
                {"tie_tol", t.tie_tol},
                {"lattice_n", t.lattice_n}};
    }
    std::vector<double> ys;
    if (ctx.c.params.contains("y_from")) ys = ctx.range("y_from", "y_to", "y_steps");
    return finding_json(multiplicity::three_solutions_1d(ctx.field("J"), ctx.real("mu"), ys, ctx.tol()));
}

json tuple_json(const integral::Tuple& t) {
    json u = json::array();
    for (const Point& p : t.u) u.push_back(point_json(p));
    return {{"u", u}, {"objective", t.objective}, {"constraint", t.constraint}};
}

integral::WeightedSpace space(const Ctx& ctx) { return {ctx.reals("weights"), ctx.real("p", 1.0)}; }

json jensen_json(Ctx& ctx, const integral::JensenReport& r) {
    if (!r.holds) ctx.finding();
    return {{"holds", r.holds}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"p_mean", r.p_mean}, {"tol", r.tol}, {"equal", r.equal}};
}

json run_integral(Ctx& ctx, const std::string& sub) {
    if (sub == "jensen") {
        const auto e = std::make_shared<Expression>(Expression::parse(ctx.c.expressions.at("f"), 1));
        return jensen_json(ctx, integral::jensen_check([e](double y) { return (*e)(std::span<const double>(&y, 1)); },
                                                       space(ctx), ctx.reals("u")));
    }
    if (sub == "log-ineq") return jensen_json(ctx, integral::log_inequality_check(space(ctx), ctx.reals("u")));

    integral::Eq82Options o;
    o.samples = ctx.count("samples", o.samples);
    o.seed = ctx.count("seed", o.seed);
    o.a = ctx.extended("a", o.a);
    o.b = ctx.extended("b", o.b);
    o.tol = ctx.tol();
    const auto r = integral::verify_eq82(ctx.field("phi"), ctx.field("psi"), space(ctx), ctx.real("r"), o);
    if (!r.holds()) ctx.finding();
    json out = {{"status", r.status},
                {"r", r.r},
                {"alpha", to_json(r.alpha)},
                {"beta", to_json(r.beta)},
                {"total_weight", r.total_weight},
                {"pointwise_inf", r.pointwise_inf},
                {"rhs", r.rhs},
                {"band", r.band},
                {"band_inf", r.band_inf},
                {"lambda_hat", r.lambda_hat ? json(*r.lambda_hat) : json(nullptr)},
                {"achieving", tuple_json(r.achieving)},
                {"tol", r.tol},
                {"sampling",
                 {{"seed", r.seed},
                  {"block_size", r.block_size},
                  {"samples", r.samples},
                  {"accepted", r.accepted},
                  {"projected", r.projected},
                  {"projection_used", r.projection_used},
                  {"violations", r.violations},
                  {"worst", r.worst ? tuple_json(*r.worst) : json(nullptr)}}},
                {"constant_tuples", {{"checked", r.constant_tuples}, {"violations", r.constant_violations}}},
                {"best_constant", r.best_constant ? tuple_json(*r.best_constant) : json(nullptr)},
                {"coercivity_unverified", r.coercivity_unverified}};
    if (!r.hypothesis_error.empty()) out["hypothesis_error"] = r.hypothesis_error;
    if (r.best_constant && r.constant_violations > 0) {
        out["violation"] = {{"tuple", tuple_json(*r.best_constant)},
                            {"rhs", r.rhs},
                            {"shortfall", r.rhs - r.best_constant->objective}};
    }
    return out;
}

json error_json(const std::string& kind, const std::string& message, const std::string& context) {
    return {{"kind", kind}, {"message", message}, {"context", context}};
}

}  // namespace

json error_report(const std::string& command, const std::string& kind, const std::string& message,
                  const std::string& context) {
    return {{"schema", kSchema}, {"command", command}, {"error", error_json(kind, message, context)}};
}

RunOutcome run(const RunConfig& config) {
    RunOutcome out;
    try {
        validate(config);
        Ctx ctx{config};
        const auto dot = config.command.find('.');
        const std::string module = config.command.substr(0, dot);
        const std::string sub = config.command.substr(dot + 1);
        json result;
        if (module == "minimax") result = run_minimax(ctx);
        else if (config.command == "path.solve") result = run_path_solve(ctx);
        else if (config.command == "path.scan") result = run_path_scan(ctx);
        else if (module == "spherical") result = run_spherical(ctx);
        else if (module == "theta") result = run_theta(ctx);
        else if (module == "multiplicity") result = run_multiplicity(ctx, sub);
        else result = run_integral(ctx, sub);
        out.exit_code = ctx.exit_code;
        out.report = {{"schema", kSchema},
                      {"command", config.command},
                      {"config", to_json(config)},
                      {"result", result},
                      {"hypothesis_failure", out.exit_code == 2}};
    } catch (const Error& e) {
        out.exit_code = is_hypothesis_failure(e.kind()) ? 2 : 1;
        out.report = error_report(config.command, std::string(to_string(e.kind())), e.what(), e.context());
        out.report["config"] = to_json(config);
    } catch (const json::exception& e) {
        out.exit_code = 1;
        out.report = error_report(config.command, "Parse", e.what(), "");
    } catch (const std::exception& e) {
        out.exit_code = 1;
        out.report = error_report(config.command, "Internal", e.what(), "");
    }
    return out;
}

}  // namespace mmlab::cli
