#pragma once

#include <chrono>
#include <string>
#include <vector>

#include "aprkit/error.hpp"

namespace aprkit::process {

struct Options {
  /// Run through `/bin/sh -c`.
  std::string command;
  /// Empty means the current directory.
  std::string workdir;
  std::string input;
  /// Zero disables the limit. On expiry the whole process group is killed.
  std::chrono::milliseconds timeout{0};
  /// Variables removed from the inherited environment.
  std::vector<std::string> env_denylist;
  /// Extra or overriding variables, "NAME=value".
  std::vector<std::string> env_extra;
  /// Captured output beyond this many bytes is discarded.
  std::size_t output_limit = 4 << 20;
};

struct Result {
  int exit_code = -1;
  /// Terminating signal, 0 if the process exited normally.
  int signal = 0;
  bool timed_out = false;
  /// stdout and stderr interleaved.
  std::string output;
  std::chrono::milliseconds elapsed{0};

  bool ok() const { return !timed_out && signal == 0 && exit_code == 0; }
};

class SpawnError : public Error {
 public:
  using Error::Error;
};

Result run_shell(const Options& options);

}  // namespace aprkit::process
