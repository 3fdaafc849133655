#include "builtins.hpp"

#include <cmath>
#include <functional>
#include <map>

#include "mmlab/error.hpp"
#include "mmlab/grid.hpp"

namespace mmlab::cli {

using nlohmann::json;

namespace {

json uniform(double lo, double hi, std::size_t n) {
    return {{"kind", "uniform"}, {"lo", {lo}}, {"hi", {hi}}, {"n", {n}}};
}

RunConfig make(std::string command, std::map<std::string, std::string> exprs, std::optional<json> domain, json params,
               std::map<std::string, double> tol = {}) {
    RunConfig c;
    c.command = std::move(command);
    c.expressions = std::move(exprs);
    c.domain = std::move(domain);
    c.params = std::move(params);
    c.tolerances = std::move(tol);
    return c;
}

struct Entry {
    std::string summary;
    std::function<RunConfig()> build;
};

const std::vector<std::pair<std::string, Entry>>& table() {
    static const std::vector<std::pair<std::string, Entry>> t = {
        {"example_1_1",
         {"two-point X against y in [0,1]: f(x0,y) = y, f(x1,y) = -y for y > 0 and f(x1,0) = 1",
          [] {
              const std::size_t ny = 101;
              RunConfig c = make("minimax.check", {}, json{{"kind", "explicit"}, {"points", {{0.0}, {1.0}}}}, json::object());
              c.y_domain = uniform(0.0, 1.0, ny);
              const auto ys = linspace(0.0, 1.0, ny);
              std::vector<double> values;
              for (double y : ys) values.push_back(y);
              for (double y : ys) values.push_back(y > 0.0 ? -y : 1.0);
              c.table = values;
              return c;
          }}},
        {"remark_5_1",
         {"F = -x^3 restricted to x^2 <= rho; a second minimum appears at rho = 1",
          [] {
              return make("multiplicity.scan-rho", {{"F", "-x1^3"}, {"Phi", "x1^2"}}, uniform(-3.0, 3.0, 60001),
                          {{"rho_from", 0.01}, {"rho_to", 2.0}, {"steps", 200}});
          }}},
        {"remark_5_1_slice",
         {"x^2 - x^3 on [-1,1]: global minima at 0 and 1",
          [] {
              return make("multiplicity.find-lambda", {{"J", "-x1^3"}, {"Phi", "x1^2"}}, uniform(-1.0, 1.0, 2001),
                          {{"lambda_from", 1.0}, {"lambda_to", 1.0}, {"steps", 1}}, {{"tol_val", 1e-6}});
          }}},
        {"remark_8_1",
         {"phi = y^2 for y <= 1 and 2 - y beyond, psi = y^2, r = 1: the weighted identity fails",
          [] {
              return make("integral.verify-82", {{"phi", "min(x1,1)^2 - (max(x1,1) - 1)"}, {"psi", "x1^2"}},
                          uniform(-4.0, 4.0, 8001),
                          {{"r", 1.0}, {"weights", {1.0, 1.0, 1.0}}, {"samples", 10000}, {"seed", 42}});
          }}},
        {"remark_8_3",
         {"f = log(1 + (y+)^2) + 0.5 (y+)^1.5 with p = 2",
          [] {
              return make("integral.jensen", {{"f", "log(1 + max(x1,0)^2) + 0.5*max(x1,0)^1.5"}}, std::nullopt,
                          {{"p", 2.0}, {"weights", {0.2, 0.3, 0.5}}, {"u", {-1.0, 0.5, 2.0}}});
          }}},
        {"corollary_8_1",
         {"log(1 + |u|) against log(1 + mean |u|), u = (0, 3)",
          [] {
              return make("integral.log-ineq", {}, std::nullopt, {{"p", 1.0}, {"weights", {1.0, 1.0}}, {"u", {0.0, 3.0}}});
          }}},
        {"linear_quadratic",
         {"minimise x on x^2 = r over [-10,10]",
          [] {
              return make("path.solve", {{"J", "x1"}, {"Phi", "x1^2"}}, uniform(-10.0, 10.0, 200001),
                          {{"r", 1.0}, {"a", 0.0}, {"b", "+inf"}});
          }}},
        {"linear_quadratic_scan",
         {"the linear_quadratic problem for r from 0.25 to 4",
          [] {
              return make("path.scan", {{"J", "x1"}, {"Phi", "x1^2"}}, uniform(-10.0, 10.0, 20001),
                          {{"r_from", 0.25}, {"r_to", 4.0}, {"steps", 16}, {"a", 0.0}, {"b", "+inf"}});
          }}},
        {"quartic_spherical",
         {"Psi = 2x^2 - x^4 on [0,10], spherical maxima for r in [0.1, 0.9]",
          [] {
              return make("spherical.analyze", {{"Psi", "2*x1^2 - x1^4"}}, uniform(0.0, 10.0, 100001),
                          {{"r_from", 0.1}, {"r_to", 0.9}, {"steps", 17}});
          }}},
        {"double_well_theta",
         {"theta for J = (x^2-1)^2 with the identity map, and the strict gap at mu = 0.5",
          [] { return make("theta.compute", {{"J", "(x1^2-1)^2"}}, uniform(-3.0, 3.0, 601), {{"mu", 0.5}}); }}},
        {"double_well_three",
         {"three critical points of (x^2-1)^2 - (x - lambda)^2 / 2",
          [] {
              return make("multiplicity.three-solutions", {{"J", "(x1^2-1)^2"}}, uniform(-3.0, 3.0, 6001), {{"mu", 1.0}});
          }}},
        {"equilateral_tie",
         {"farthest-tie point of a unit equilateral triangle",
          [] {
              return make("multiplicity.farthest-tie", {}, std::nullopt,
                          {{"points", {{0.0, 0.0}, {1.0, 0.0}, {0.5, std::sqrt(3.0) / 2.0}}}, {"hull_grid_n", 300}});
          }}},
        {"affine_eq82",
         {"phi = y, psi = y^2 on [-10,10], three unit weights, r = 1",
          [] {
              return make("integral.verify-82", {{"phi", "x1"}, {"psi", "x1^2"}}, uniform(-10.0, 10.0, 20001),
                          {{"r", 1.0}, {"weights", {1.0, 1.0, 1.0}}, {"samples", 10000}, {"seed", 42}});
          }}},
    };
    return t;
}

}  // namespace

const std::vector<BuiltinInfo>& builtins() {
    static const std::vector<BuiltinInfo> list = [] {
        std::vector<BuiltinInfo> v;
        for (const auto& [name, e] : table()) v.push_back({name, e.summary});
        return v;
    }();
    return list;
}

RunConfig builtin_config(const std::string& name) {
    for (const auto& [n, e] : table()) {
        if (n == name) {
            RunConfig c = e.build();
            c.builtin = name;
            return c;
        }
    }
    std::string names;
    for (const auto& [n, e] : table()) names += (names.empty() ? "" : ", ") + n;
    fail(ErrorKind::Validation, "unknown builtin '" + name + "'", "known: " + names);
}

}  // namespace mmlab::cli
