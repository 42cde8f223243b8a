#pragma once

#include <iosfwd>

namespace annular {

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitNotValidated = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `annular` tool; argv[0] is the program name.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace annular
