#pragma once

#include <iosfwd>

namespace robalt {

inline constexpr const char* kVersion = "0.1.0";

/// Exit codes returned by run_cli.
enum ExitCode : int {
    kExitOk = 0,
    kExitParse = 2,
    kExitData = 3,
    kExitConvergence = 4,
    kExitNumeric = 5,
};

/// Entry point of the command-line tool; writes results to `out` and
/// diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace robalt
