#pragma once

#include <iosfwd>

namespace hbdiag::cli {

enum ExitCode : int {
  kSuccess = 0,
  kRuntimeError = 1,
  kUsageError = 2,
  kAnomalyDetected = 3,
};

/// Entry point for `hbdiag`. Normal output goes to `out`, diagnostics and
/// warnings to `err`. Log verbosity is read from HBDIAG_LOG_LEVEL.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hbdiag::cli
