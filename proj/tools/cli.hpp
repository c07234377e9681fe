#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace granusim::cli {

// Exit statuses. The nonzero ones other than kInternal mirror ErrorKind.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumeric = 4;
inline constexpr int kExitRemote = 5;

/// Runs one command. `args` excludes the program name. Summaries and
/// tables go to `out`; progress and diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace granusim::cli
