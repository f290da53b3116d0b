#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace expertroute {

/// Exit codes: 0 success, 1 runtime failure, 2 usage or validation error.
enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitUsage = 2 };

/// Entry point for the `expertroute` command line. argv[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Truncates (not rounds) to `decimals` places; 1.6386 -> "1.63".
std::string format_truncated(double v, int decimals);
/// Fixed notation rounded to `decimals` places.
std::string format_fixed(double v, int decimals);

/// "0:4:0.5" -> {0, 0.5, ..., 4}. Endpoints inclusive within 1e-9 of a step.
std::vector<double> parse_range(const std::string& spec);

}  // namespace expertroute
