#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace pagecusum::cli {

/// Runs one subcommand. `args` excludes the program name.
/// Returns 0 on success, 2 on invalid input, 1 on runtime failure.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pagecusum::cli
