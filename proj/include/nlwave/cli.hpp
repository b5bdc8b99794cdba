#pragma once

// Command-line front end. One command per invocation:
//
//   nlwave <speed|roots|bounds|wave|simulate|validate-kernel> --config FILE [--out DIR] [--quiet]
//
// Exit codes: 0 success, 2 configuration or usage error, 3 a mathematical
// precondition does not hold, 4 numerical failure.

#include <iosfwd>
#include <string>
#include <vector>

namespace nlwave::cli {

enum ExitCode : int {
    ok = 0,
    config_error = 2,
    precondition_failed = 3,
    numerical_failure = 4,
};

/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

}  // namespace nlwave::cli
