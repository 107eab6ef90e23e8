#pragma once

// Command-line front end; kept in a library so tests can drive it in-process.

#include <iosfwd>

namespace tdw::cli {

/// Exit codes: 0 success, 1 computational failure, 2 usage or configuration error.
enum ExitCode : int { kSuccess = 0, kFailure = 1, kUsage = 2 };

/**
 * Runs one command line. With --json a single document goes to out and all
 * human-readable text to err; otherwise human text goes to out.
 */
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tdw::cli
