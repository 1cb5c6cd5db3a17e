#pragma once

#include <ostream>

namespace mphase::cli {

enum ExitCode : int {
  kOk = 0,
  kParseError = 1,
  kValidationError = 2,
  kNotConverged = 3,
  kMisconfigured = 4,
};

/// mphase-opf validate|solve|plan <file.feeder> [--engine cfpso|iwpso|ga]
///   [--seed N|auto] [--out DIR] [--set key=value ...]
/// Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace mphase::cli
