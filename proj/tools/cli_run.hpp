#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cli_config.hpp"

namespace erlab_cli {

enum ExitCode { kExitOk = 0, kExitInvalid = 1, kExitPointFailures = 2, kExitIo = 3 };

struct RunSummary {
  int exit_code = kExitOk;
  std::size_t computed = 0;
  std::size_t failed = 0;
  std::vector<std::string> outputs;
  std::vector<std::string> failures;
  double wall_seconds = 0.0;
};

// Runs one subcommand. The summary table goes to `out`, diagnostics to `err`.
RunSummary run(const RunConfig& config, std::ostream& out, std::ostream& err);

// Writes `text` to `path` through a temporary file and a rename.
void write_atomic(const std::string& path, const std::string& text);

// Entry point shared by the executable and the tests.
int main_with_args(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace erlab_cli
