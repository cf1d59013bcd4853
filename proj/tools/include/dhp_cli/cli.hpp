#pragma once

// Command-line front end: fit, evaluate, predict, simulate, sweep and
// export-dynamics. Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <string>
#include <vector>

namespace dhp::cli {

/// args[0] is the program name.
int run(const std::vector<std::string>& args);
int run(int argc, const char* const* argv);

}  // namespace dhp::cli
