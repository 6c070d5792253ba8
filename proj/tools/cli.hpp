#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hygronet::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,       ///< validation failed or unexpected error
  kConfigError = 2,   ///< bad configuration or input file
  kSolverError = 3,   ///< singular or disconnected structure
};

/// Runs the command line in-process. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hygronet::cli
