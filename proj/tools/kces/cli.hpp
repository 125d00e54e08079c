#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace kces::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitConfig = 4;

/// Runs the command line `args` (without the program name) and returns the
/// process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kces::cli
