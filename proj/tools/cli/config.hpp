#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace mmlab::cli {

inline constexpr const char* kSchema = "minimax-lab/1";

// One CLI run. Builtin fixtures are resolved at load time; `builtin` keeps the
// name and the other fields hold the resolved problem.
struct RunConfig {
    std::string command;
    std::string builtin;
    std::map<std::string, std::string> expressions;  // J, Phi, Psi, F, f, phi, psi
    std::optional<nlohmann::json> domain;            // grid JSON
    std::optional<nlohmann::json> y_domain;          // second grid for minimax.check
    std::optional<std::vector<double>> table;        // f(x, y), row-major by x
    std::map<std::string, double> tolerances;
    nlohmann::json params = nlohmann::json::object();
    std::string output;

    bool operator==(const RunConfig& o) const;
};

const std::vector<std::string>& commands();

nlohmann::json to_json(const RunConfig& c);

// Strict parse: unknown keys are rejected with their path. A `problem.builtin`
// entry is expanded first and the remaining fields override it.
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

// Checks the command, grids, expressions, tolerances and parameter names.
void validate(const RunConfig& c);

}  // namespace mmlab::cli
