#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace folds::cli {

enum ExitCode : int {
  kOk = 0,
  kFalse = 1,
  kInputError = 2,
  kBudgetExhausted = 3,
};

/// Version of the JSON envelope written by --format json.
inline constexpr int kSchemaVersion = 1;

/// Runs one command line (without the program name). Results go to `out`,
/// diagnostics to `err`; the return value is the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace folds::cli
