#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dond::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitUsage = 64;

/// Runs the `dond` command line. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dond::cli
