#pragma once

#include <iosfwd>

namespace qfm::cli {

// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kSimulationError = 3,
  kIoError = 4,
  kInsufficientRecord = 5,
};

// Runs one command line. Results go to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qfm::cli
