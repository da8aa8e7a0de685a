#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wxr::cli {

/// Stable process exit codes.
enum ExitCode : int {
  kSuccess = 0,
  kUsageError = 1,
  kDataError = 2,
  kBackendFailure = 3,
};

/// Entry point for the `wxr` tool. args[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wxr::cli
