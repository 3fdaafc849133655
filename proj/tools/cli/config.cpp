#include "config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "builtins.hpp"
#include "mmlab/error.hpp"
#include "mmlab/expr.hpp"
#include "mmlab/extended_real.hpp"
#include "mmlab/serialize.hpp"

namespace mmlab::cli {

using nlohmann::json;

namespace {

enum class P { Real, Extended, Count, Flag, Reals, Points };

const std::map<std::string, std::map<std::string, P>>& param_table() {
    static const std::map<std::string, std::map<std::string, P>> t = {
        {"minimax.check", {}},
        {"path.solve", {{"r", P::Real}, {"a", P::Extended}, {"b", P::Extended}, {"dual", P::Flag}, {"polish", P::Flag}}},
        {"path.scan",
         {{"r_from", P::Real}, {"r_to", P::Real}, {"steps", P::Count}, {"a", P::Extended}, {"b", P::Extended},
          {"polish", P::Flag}}},
        {"spherical.analyze",
         {{"r_from", P::Real}, {"r_to", P::Real}, {"steps", P::Count}, {"a", P::Real}, {"b", P::Extended},
          {"fd_step", P::Real}, {"sphere_samples", P::Count}, {"seed", P::Count}}},
        {"theta.compute", {{"mu", P::Real}}},
        {"multiplicity.scan-rho",
         {{"rho_from", P::Real}, {"rho_to", P::Real}, {"steps", P::Count}, {"all_events", P::Flag}}},
        {"multiplicity.find-lambda", {{"lambda_from", P::Real}, {"lambda_to", P::Real}, {"steps", P::Count}}},
        {"multiplicity.farthest-tie", {{"points", P::Points}, {"hull_grid_n", P::Count}}},
        {"multiplicity.three-solutions",
         {{"mu", P::Real}, {"y_from", P::Real}, {"y_to", P::Real}, {"y_steps", P::Count}}},
        {"integral.verify-82",
         {{"r", P::Real}, {"weights", P::Reals}, {"samples", P::Count}, {"seed", P::Count}, {"a", P::Extended},
          {"b", P::Extended}}},
        {"integral.jensen", {{"p", P::Real}, {"weights", P::Reals}, {"u", P::Reals}}},
        {"integral.log-ineq", {{"p", P::Real}, {"weights", P::Reals}, {"u", P::Reals}}},
    };
    return t;
}

// Expressions each command reads; the first list is required, the second optional.
const std::map<std::string, std::pair<std::vector<std::string>, std::vector<std::string>>>& expr_table() {
    static const std::map<std::string, std::pair<std::vector<std::string>, std::vector<std::string>>> t = {
        {"minimax.check", {{}, {"f"}}},
        {"path.solve", {{"J", "Phi"}, {}}},
        {"path.scan", {{"J", "Phi"}, {}}},
        {"spherical.analyze", {{"Psi"}, {}}},
        {"theta.compute", {{"J"}, {"Phi"}}},
        {"multiplicity.scan-rho", {{"F", "Phi"}, {}}},
        {"multiplicity.find-lambda", {{"J", "Phi"}, {}}},
        {"multiplicity.farthest-tie", {{}, {}}},
        {"multiplicity.three-solutions", {{"J"}, {}}},
        {"integral.verify-82", {{"phi", "psi"}, {}}},
        {"integral.jensen", {{"f"}, {}}},
        {"integral.log-ineq", {{}, {}}},
    };
    return t;
}

const std::set<std::string> kExpressionKeys = {"J", "Phi", "Psi", "F", "f", "phi", "psi"};
const std::set<std::string> kToleranceKeys = {"tol_val",   "tol_sep",   "gap_tol",    "bisect_tol", "a7_tol",
                                              "euler_tol", "gamma_tol", "lambda_sep", "phi_floor"};

[[noreturn]] void invalid(const std::string& path, const std::string& message) {
    fail(ErrorKind::Validation, "config: " + message, "at " + path);
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& path) {
    if (!obj.is_object()) invalid(path, "expected an object");
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.count(key)) invalid(path + "." + key, "unknown key '" + key + "'");
    }
}

void check_param(const std::string& path, const json& v, P kind) {
    switch (kind) {
        case P::Real:
            if (!v.is_number()) invalid(path, "expected a number");
            break;
        case P::Extended:
            if (v.is_number()) break;
            if (!v.is_string() || (v != "+inf" && v != "-inf")) invalid(path, "expected a number, \"+inf\" or \"-inf\"");
            break;
        case P::Count:
            if (!v.is_number_integer() || v.get<long long>() < 0) invalid(path, "expected a non-negative integer");
            break;
        case P::Flag:
            if (!v.is_boolean()) invalid(path, "expected true or false");
            break;
        case P::Reals:
            if (!v.is_array()) invalid(path, "expected an array of numbers");
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (!v[i].is_number()) invalid(path + "[" + std::to_string(i) + "]", "expected a number");
            }
            break;
        case P::Points:
            if (!v.is_array()) invalid(path, "expected an array of points");
            for (std::size_t i = 0; i < v.size(); ++i) check_param(path + "[" + std::to_string(i) + "]", v[i], P::Reals);
            break;
    }
}

std::size_t grid_dim(const json& g, const std::string& path) {
    try {
        return grid_from_json(g).dim();
    } catch (const Error& e) {
        invalid(path, e.what() + (e.context().empty() ? std::string() : " (" + e.context() + ")"));
    }
}

}  // namespace

bool RunConfig::operator==(const RunConfig& o) const {
    return command == o.command && builtin == o.builtin && expressions == o.expressions && domain == o.domain &&
           y_domain == o.y_domain && table == o.table && tolerances == o.tolerances && params == o.params &&
           output == o.output;
}

const std::vector<std::string>& commands() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [k, _] : param_table()) v.push_back(k);
        return v;
    }();
    return names;
}

json to_json(const RunConfig& c) {
    json j = {{"schema", kSchema}, {"command", c.command}};
    json problem = json::object();
    if (!c.builtin.empty()) problem["builtin"] = c.builtin;
    for (const auto& [k, v] : c.expressions) problem[k] = v;
    if (c.table) problem["table"] = *c.table;
    j["problem"] = problem;
    if (c.domain) j["domain"] = *c.domain;
    if (c.y_domain) j["y_domain"] = *c.y_domain;
    j["tolerances"] = c.tolerances;
    j["params"] = c.params;
    if (!c.output.empty()) j["output"] = c.output;
    return j;
}

RunConfig config_from_json(const json& j) {
    check_keys(j, {"schema", "command", "problem", "domain", "y_domain", "tolerances", "params", "output"}, "$");
    if (j.contains("schema") && j["schema"] != kSchema) invalid("$.schema", std::string("expected \"") + kSchema + "\"");

    RunConfig c;
    const json problem = j.value("problem", json::object());
    std::set<std::string> problem_keys(kExpressionKeys);
    problem_keys.insert({"builtin", "table"});
    check_keys(problem, problem_keys, "$.problem");
    if (problem.contains("builtin")) {
        if (!problem["builtin"].is_string()) invalid("$.problem.builtin", "expected a string");
        c = builtin_config(problem["builtin"].get<std::string>());
    }

    if (j.contains("command")) {
        if (!j["command"].is_string()) invalid("$.command", "expected a string");
        c.command = j["command"].get<std::string>();
    }
    for (const auto& [key, value] : problem.items()) {
        if (key == "builtin") continue;
        if (key == "table") {
            check_param("$.problem.table", value, P::Reals);
            c.table = value.get<std::vector<double>>();
            continue;
        }
        if (!value.is_string()) invalid("$.problem." + key, "expected an expression string");
        c.expressions[key] = value.get<std::string>();
    }
    for (const char* key : {"domain", "y_domain"}) {
        if (!j.contains(key)) continue;
        check_keys(j[key], {"kind", "lo", "hi", "n", "points"}, std::string("$.") + key);
        (std::string(key) == "domain" ? c.domain : c.y_domain) = j[key];
    }
    if (j.contains("tolerances")) {
        const json& t = j["tolerances"];
        check_keys(t, kToleranceKeys, "$.tolerances");
        for (const auto& [key, value] : t.items()) {
            if (!value.is_number()) invalid("$.tolerances." + key, "expected a number");
            c.tolerances[key] = value.get<double>();
        }
    }
    if (j.contains("params")) {
        if (!j["params"].is_object()) invalid("$.params", "expected an object");
        for (const auto& [key, value] : j["params"].items()) c.params[key] = value;
    }
    if (j.contains("output")) {
        if (!j["output"].is_string()) invalid("$.output", "expected a file path");
        c.output = j["output"].get<std::string>();
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Io, "cannot open config file", path);
    std::stringstream buf;
    buf << in.rdbuf();
    json j;
    try {
        j = json::parse(buf.str());
    } catch (const json::parse_error& e) {
        fail(ErrorKind::Parse, std::string("config is not valid JSON: ") + e.what(),
             path + ", byte " + std::to_string(e.byte));
    }
    return config_from_json(j);
}

void validate(const RunConfig& c) {
    const auto ps = param_table().find(c.command);
    if (ps == param_table().end()) {
        std::string names;
        for (const auto& n : commands()) names += (names.empty() ? "" : ", ") + n;
        invalid("$.command", "unknown command '" + c.command + "' (expected one of " + names + ")");
    }
    for (const auto& [key, value] : c.params.items()) {
        const auto it = ps->second.find(key);
        if (it == ps->second.end()) invalid("$.params." + key, "unknown parameter '" + key + "' for " + c.command);
        check_param("$.params." + key, value, it->second);
    }
    for (const auto& [key, value] : c.tolerances) {
        if (!kToleranceKeys.count(key)) invalid("$.tolerances." + key, "unknown tolerance");
        if (!(value > 0.0)) invalid("$.tolerances." + key, "tolerances must be positive");
    }

    const auto& [required, optional] = expr_table().at(c.command);
    for (const auto& [key, _] : c.expressions) {
        if (std::find(required.begin(), required.end(), key) == required.end() &&
            std::find(optional.begin(), optional.end(), key) == optional.end()) {
            invalid("$.problem." + key, "expression '" + key + "' is not used by " + c.command);
        }
    }
    for (const auto& key : required) {
        if (!c.expressions.count(key)) invalid("$.problem", "missing expression '" + key + "' for " + c.command);
    }

    std::size_t arity = 0;
    const bool needs_domain = c.command != "multiplicity.farthest-tie" && c.command != "integral.jensen" &&
                              c.command != "integral.log-ineq";
    if (c.domain) {
        arity = grid_dim(*c.domain, "$.domain");
    } else if (needs_domain) {
        invalid("$.domain", "missing grid for " + c.command);
    }
    if (c.domain) {
        const GridSpec g = grid_from_json(*c.domain);
        if (g.kind() == GridSpec::Kind::Uniform) {
            for (std::size_t n : g.counts()) {
                if (n < 2) invalid("$.domain.n", "every axis needs at least 2 points");
            }
        } else if (g.size() < 2) {
            invalid("$.domain.points", "at least 2 points are required");
        }
    }
    if (c.command == "minimax.check") {
        if (!c.y_domain) invalid("$.y_domain", "minimax.check needs a y grid");
        const std::size_t ydim = grid_dim(*c.y_domain, "$.y_domain");
        const bool has_f = c.expressions.count("f") != 0;
        if (has_f == c.table.has_value()) invalid("$.problem", "give exactly one of 'f' and 'table'");
        if (c.table) {
            const std::size_t want = grid_from_json(*c.domain).size() * grid_from_json(*c.y_domain).size();
            if (c.table->size() != want) {
                invalid("$.problem.table", "expected " + std::to_string(want) + " values, got " +
                                               std::to_string(c.table->size()));
            }
        }
        arity += ydim;
    } else {
        if (c.y_domain) invalid("$.y_domain", "only minimax.check uses a y grid");
        if (c.table) invalid("$.problem.table", "only minimax.check takes a table");
    }
    if (c.command == "integral.jensen") arity = 1;
    for (const auto& [key, text] : c.expressions) {
        try {
            (void)Expression::parse(text, arity);
        } catch (const Error& e) {
            invalid("$.problem." + key, e.what() + (e.context().empty() ? std::string() : " (" + e.context() + ")"));
        }
    }
}

}  // namespace mmlab::cli
