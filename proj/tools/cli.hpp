#pragma once

#include <string>
#include <vector>

namespace evstar {

/// Runs one CLI invocation (args excludes the program name) and returns the
/// process exit code: 0 success, 2 usage/input error, 3 pipeline failure.
/// Reentrant so `rerun` can replay a stored argument vector in-process.
int run_cli(const std::vector<std::string>& args);

}  // namespace evstar
