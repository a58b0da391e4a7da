#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bestapprox::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;         // usage, load or runtime error
inline constexpr int kNotConverged = 2;  // solve
inline constexpr int kFailed = 3;        // certify / diagnose

/// Runs one command; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bestapprox::cli
