#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qfc {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kExitOk = 0, kExitUsage = 2, kExitConfig = 3, kExitComputation = 4, kExitIo = 5 };

/// Runs one qfcring subcommand. `args` excludes the program name. Module
/// errors are printed verbatim to `err` and mapped to an exit code.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qfc
