#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace keb::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kSolver = 2,
    kThreshold = 3,
    kIo = 4,
};

/// Runs one kebcli invocation. `args` excludes the program name. Reports go
/// to `out` (or the --output file), diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace keb::cli
