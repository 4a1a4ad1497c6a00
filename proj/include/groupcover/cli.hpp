#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace groupcover::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumeric = 4;

// Runs the command line given the arguments after the program name.
// Diagnostics go to err as one-line messages; results go to out unless an
// --output path is given.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace groupcover::cli
