#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace svgap::cli {

/// Exit statuses of the command-line front end.
enum ExitCode : int {
    success = 0,
    computation_error = 1,  // a machine-readable error document goes to `err`
    usage_error = 2,
};

/// Runs one invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace svgap::cli
