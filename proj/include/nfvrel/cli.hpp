#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nfvrel::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitUsage = 2;           // bad flags, unreadable or invalid input
inline constexpr int kExitEnumeration = 3;     // too many servers to enumerate
inline constexpr int kExitNodeLimit = 4;       // solution written but search was truncated
inline constexpr int kExitValidationFail = 5;  // exact and Monte Carlo disagree beyond 3 sigma

// Runs the command line `args` (args[0] is the program name). Machine-readable
// payload goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nfvrel::cli
