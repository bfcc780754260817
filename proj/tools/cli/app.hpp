#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dicke::cli {

enum ExitCode : int
{
    kExitOk = 0,
    kExitComputation = 1,
    kExitUsage = 2,
};

/// Full command-line entry point. args[0] is the program name.
int run(std::vector<std::string> const& args, std::ostream& out,
        std::ostream& err);

}  // namespace dicke::cli
