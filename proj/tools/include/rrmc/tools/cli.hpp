#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace rrmc::tools {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerification = 1;
inline constexpr int kExitUsage = 2;

/// Runs the `rrmc` command line. `args` excludes the program name. Regular
/// output and raw streams go to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rrmc::tools
