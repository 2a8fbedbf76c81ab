#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tbrain {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,  // runtime error or failed check
  kExitUsage = 2,
  kExitConfig = 3,
  kExitIo = 4,
  kExitSnapshot = 5,
  kExitLookup = 6,
};

/// Subcommands: simulate, train, perceive, recall, query, export, grad-check.
/// args excludes the program name. Records go to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace tbrain
