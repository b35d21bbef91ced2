#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rsqd::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNumerical = 2;
inline constexpr int kExitUsage = 64;

/// Runs one command line (without the program name). Tables and CSV go to
/// `out`, diagnostics and counts to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace rsqd::cli
