#pragma once

#include <chrono>
#include <filesystem>
#include <string>

namespace wxr::detail {

struct ProcessResult {
  int exit_code = 0;
  bool timed_out = false;
  /// Set when the child was terminated by a signal (exit_code holds the signal).
  bool signaled = false;
};

/// Runs `/bin/sh -c command` in its own process group with stdout and stderr
/// redirected to `log_path`. The group is killed once `timeout` elapses.
ProcessResult run_shell(const std::string& command, const std::filesystem::path& log_path,
                        std::chrono::milliseconds timeout);

/// Single-quotes `s` for /bin/sh.
std::string shell_quote(const std::string& s);

/// Last `max_bytes` of a text file, or empty if unreadable.
std::string read_tail(const std::filesystem::path& path, std::size_t max_bytes = 4096);

}  // namespace wxr::detail
