#pragma once

#include <string>
#include <vector>

namespace radonkit::cli {

// Parses argv (without the program name) and executes one subcommand.
// Returns the process exit code: 0 success, 1 usage or validation error,
// 2 numerical failure.
int run(const std::vector<std::string>& args);
int run(int argc, const char* const* argv);

}  // namespace radonkit::cli
