#pragma once

#include <string>
#include <vector>

namespace splitfeas::cli {

/// Exit codes: 0 success, 1 operational error, 2 requirement violation.
struct CommandResult {
  int exit_code = 0;
  std::vector<std::string> artifacts;
  std::string summary;
};

CommandResult cmd_generate(const std::vector<std::string>& args);
CommandResult cmd_solve(const std::vector<std::string>& args);
CommandResult cmd_certify(const std::vector<std::string>& args);
CommandResult cmd_sweep(const std::vector<std::string>& args);
CommandResult cmd_plot(const std::vector<std::string>& args);

/// Subcommand dispatch; prints the summary and returns the exit code.
int run_main(int argc, char** argv);

}  // namespace splitfeas::cli
