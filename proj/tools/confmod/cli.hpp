#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace confmod::cli {

enum ExitCode : int {
  kOk = 0,
  kVerificationFailure = 1,
  kUsage = 2,
  kConfig = 3,
  kSolver = 4,
};

/// Runs one `confmod` invocation; args excludes the program name.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace confmod::cli
