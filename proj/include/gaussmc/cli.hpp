#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gaussmc::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kNumericFailure = 1;
inline constexpr int kUsageError = 2;

/// Entry point of the gaussmc command-line tool; args excludes the program
/// name. Reports go to `out` unless --out is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gaussmc::cli
