#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace clustergen::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kValidationFailure = 1,
  kConvergenceFailure = 2,
  kNlFailure = 3,
};

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Convenience overload; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace clustergen::cli
