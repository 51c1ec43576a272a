#pragma once

#include <chrono>
#include <string>

namespace morphline {

struct CommandResult {
    int exit_code = -1;
    bool timed_out = false;
    std::string standard_output;
};

/// Runs `<command> <argument>` through /bin/sh, the argument passed as a single quoted word.
/// Standard output is captured; standard error is inherited. The whole process group is
/// killed when the timeout expires.
CommandResult run_command(const std::string& command, const std::string& argument,
                          std::chrono::milliseconds timeout);

}  // namespace morphline
