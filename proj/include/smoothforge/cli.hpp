#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace smoothforge {

/// Runs one `smoothforge <subcommand> ...` invocation; args exclude the program name.
/// Returns the process exit code: 0 ok, 2 user error, 3 I/O, 4 capability.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace smoothforge
