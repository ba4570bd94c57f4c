#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cmr::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;
inline constexpr int kUsage = 2;
inline constexpr int kFormat = 3;
inline constexpr int kNumeric = 4;

// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

}  // namespace cmr::cli
