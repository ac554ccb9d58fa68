#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace aoii::cli {

// Runs one tool invocation; args excludes argv[0]. Split out of main() so tests
// can drive the full command surface in-process. Returns the process exit code:
// 0 success, 2 invalid configuration, 3 numerical failure.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace aoii::cli
