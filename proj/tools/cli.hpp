#pragma once

#include <iosfwd>

namespace omsim::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsageError = 1,
  kSimulationFailure = 2,
  kValidationFailure = 3,
};

/// Entry point of the omsim command; CSV/SVG without --output go to `out`,
/// diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace omsim::cli
