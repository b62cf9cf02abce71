#pragma once

#include <iosfwd>

namespace spatia::cli {

/// Exit codes: 0 success, 1 usage error, 2 validation error, 3 runtime error.
enum ExitCode : int { kSuccess = 0, kUsage = 1, kValidation = 2, kRuntime = 3 };

/// Runs one command line. Results go to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace spatia::cli
