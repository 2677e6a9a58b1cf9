#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fedcarbon {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitInvalidInput = 2,
  kExitTargetNotReached = 3,
};

/// Entry point of the `fedcarbon` tool. `args` excludes the program name.
/// Machine-readable output goes to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace fedcarbon
