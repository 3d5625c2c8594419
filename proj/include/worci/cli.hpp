#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace worci::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kData = 3, kSolver = 4 };

/// Version plus build type, compiler, git revision and OpenMP availability.
std::string version_string();

/// Parses `args` (without the program name) and runs one subcommand.
/// Normal output goes to `out`, diagnostics and usage text to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace worci::cli
