#pragma once

#include <string>
#include <vector>

namespace kakeya::cli {

/// Runs one tool invocation (args excludes the program name).
/// Exit status: 0 all requested checks pass, 1 usage or I/O error,
/// 2 a tolerance check ran and failed.
int run(const std::vector<std::string>& args);

}  // namespace kakeya::cli
