#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace freshcost::cli {

enum ExitCode : int {
    kOk = 0,
    kDataError = 1,   // validation, data, parse or I/O failure
    kUsageError = 2,  // bad flags or arguments
};

// Runs one invocation; args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace freshcost::cli
