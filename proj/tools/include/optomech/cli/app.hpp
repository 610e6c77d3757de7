#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace optomech::cli {

enum ExitCode : int { kSuccess = 0, kRuntimeError = 1, kUsageError = 2 };

/// Runs the command line `args` (without the program name). CSV goes to
/// --out or `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace optomech::cli
