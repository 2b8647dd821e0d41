#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rlvr::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kInputError = 3, kInfraError = 4 };

/// Runs the command line `args` (args[0] is the program name). Reports go to
/// `out`, diagnostics to `err`. Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rlvr::cli
