#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sahg::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumeric = 3;

// Runs the command line `args` (without the program name) and returns the
// process exit code: 0 success, 2 usage or configuration error, 3 numeric
// failure during training.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::string version();

}  // namespace sahg::cli
