#pragma once

namespace morphline {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitInput = 2, kExitAdapter = 3 };

/// Entry point of the `morphline` tool; returns the process exit code.
int run_cli(int argc, const char* const* argv);

}  // namespace morphline
