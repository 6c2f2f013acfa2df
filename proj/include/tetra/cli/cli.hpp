#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tetra::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitUsage = 2;

// Runs one subcommand (bench, commute, ablate, epsilon, selftest) and returns
// the process exit status. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tetra::cli
