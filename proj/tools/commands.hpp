#pragma once

#include <ostream>

namespace minkvox::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kIo = 2, kNumerical = 3 };

/// Entry point of the `minkvox` tool; writes reports to `out` and diagnostics
/// to `err` and returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace minkvox::cli
