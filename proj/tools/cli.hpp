#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace prodrisk::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,  // validation, usage and parse errors
    kIo = 2,
};

/// Runs one command line (without the program name). Artifacts go to the
/// --out directory, reports and summaries to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace prodrisk::cli
