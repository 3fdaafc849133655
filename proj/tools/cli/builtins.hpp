#pragma once

#include <string>
#include <vector>

#include "config.hpp"

namespace mmlab::cli {

struct BuiltinInfo {
    std::string name;
    std::string summary;
};

const std::vector<BuiltinInfo>& builtins();

// Throws Validation for an unknown name.
RunConfig builtin_config(const std::string& name);

}  // namespace mmlab::cli
