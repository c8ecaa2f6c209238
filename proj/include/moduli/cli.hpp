#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace moduli {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 1, kExitUsage = 2, kExitIo = 3 };

/// "a:b:step" → a, a + step, ..., up to b (inclusive within rounding).
std::vector<double> parse_eps_range(std::string_view spec);

/// Runs the tool with argv-style arguments (args[0] is the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace moduli
