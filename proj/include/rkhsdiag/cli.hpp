#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace rkhsdiag::cli {

/// Exit codes of the rkhsdiag command.
enum ExitCode : int { kPass = 0, kResidualFailure = 1, kUsage = 2, kNumericFailure = 3 };

/// Runs the command line `args` (without the program name). Reports go to `out`
/// unless --out is given; diagnostics and usage text go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rkhsdiag::cli
