#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hybrid::cli {

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // validation failure or numerical error
inline constexpr int kExitUsage = 2;    // bad arguments, missing file, schema violation

/// Runs one subcommand. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hybrid::cli
