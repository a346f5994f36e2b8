// Command-line front end, factored as a library call so tests can drive it
// in-process and assert on the exit-code contract.
#pragma once

#include <string>
#include <vector>

namespace holonomy {

// Runs the CLI on argv[1:]-style arguments. Returns the process exit code:
// 0 success, 1 configuration/usage error, 2 numerical failure (including a
// failing verification suite).
int cli_main(const std::vector<std::string>& args);

}  // namespace holonomy
