#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace brm::cli {

/// Parses `args` (without the program name) and runs the chosen subcommand.
/// Returns the process exit code: 0 ok, 1 usage error, 2 data error.
int run_app(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace brm::cli
