#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace rednet::cli {

/// Runs one `rednet` subcommand. `args` excludes the program name. Returns
/// the process exit code; diagnostics go to `err` on a single line.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rednet::cli
