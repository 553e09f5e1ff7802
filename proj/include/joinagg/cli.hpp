#pragma once

#include <iosfwd>

namespace joinagg {

/// Exit codes of the command-line tool.
enum ExitCode : int
{
    kExitOk = 0,
    kExitIo = 1,
    kExitQuery = 2,
    kExitMismatch = 3,
};

/** Entry point of the `joinagg` tool: subcommands run, compare, gen and explain.  Results go to `out`, statistics
 * and diagnostics to `err`. */
int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

}
