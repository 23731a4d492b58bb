#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace conectl {

enum ExitCode : int {
    kSuccess = 0,
    kCheckFailed = 1,
    kInputError = 2,
    kNumericRange = 3,
};

/// Runs the command line `args` (without the program name). Everything the
/// tool prints goes to `out` and `err`, so tests can drive it in-process.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace conectl
