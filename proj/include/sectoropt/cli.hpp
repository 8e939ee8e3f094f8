#pragma once

#include <string>
#include <vector>

namespace sectoropt {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitTruncated = 3;

/// Runs one command line (without the program name) and returns the exit
/// status. Diagnostics go to standard error; data goes to files.
int run_cli(const std::vector<std::string>& args);

}  // namespace sectoropt
