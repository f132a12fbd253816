#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace purelax::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kUsage = 1,  // bad flags or unreadable/unwritable files
  kInfeasible = 2,
  kInvalidInput = 3,  // parse, validation and dimension errors
  kInternal = 4,      // solver failures and bound violations
};

/// Runs one command. `args` excludes the program name. Output files go to
/// --output when given, otherwise to `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace purelax::cli
