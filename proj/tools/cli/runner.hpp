#pragma once

#include <nlohmann/json.hpp>

#include "config.hpp"

namespace mmlab::cli {

// 0: ran, property holds or nothing to report; 2: a hypothesis failed on this
// input; 1: invalid input or internal error.
struct RunOutcome {
    int exit_code = 0;
    nlohmann::json report;
};

RunOutcome run(const RunConfig& config);

// The error report used for failures before a config exists.
nlohmann::json error_report(const std::string& command, const std::string& kind, const std::string& message,
                            const std::string& context);

}  // namespace mmlab::cli
