#pragma once

#include <iosfwd>

namespace conetrace {

inline constexpr const char* kToolVersion = "0.1.0";

/// Exit codes of the conetrace command line.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitValidation = 2,
  kExitBudget = 3,
  kExitUsage = 64,
};

/// Entry point of the `conetrace` tool: subcommands geodesics, dlspec,
/// diffract, trace, compare and bands.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace conetrace
