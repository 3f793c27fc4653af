#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vizcap::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

// Runs one vizcap command line. args[0] is the program name. Interactive
// input (outlier confirmation, the session REPL) is read from `in`.
int Run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace vizcap::cli
