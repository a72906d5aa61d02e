#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cimset::cli {

// Exit codes shared by every subcommand.
inline constexpr int kOk = 0;
inline constexpr int kNegative = 1;  // not equivalent, check failed, not in kernel
inline constexpr int kError = 2;

// args excludes the program name. Graph arguments accept a file path, "-" for stdin,
// or "fixture:<name>" for the embedded figure graphs.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cimset::cli
