#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace nlstiff::cli {

// Process exit codes.
inline constexpr int kExitSuccess = 0;
inline constexpr int kExitInvalidInput = 2;
inline constexpr int kExitModelDegenerate = 3;
inline constexpr int kExitNumericalFailure = 4;

// Runs the command line `args` (program name excluded), writing reports to
// `out` (or the --out target) and diagnostics to `err`. Returns the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nlstiff::cli
