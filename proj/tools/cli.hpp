#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace voxproj::cli {

inline constexpr const char* kToolVersion = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Runs one command line (without the program name). Diagnostics go to err
/// as a single line; results go to out.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace voxproj::cli
