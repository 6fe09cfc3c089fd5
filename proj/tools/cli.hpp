#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qtt::cli {

enum ExitCode : int {
    kOk = 0,
    kValidation = 2,
    kNumerical = 3,
    kIo = 4,
};

// Parses and dispatches one command line. Output and diagnostics go to the
// given streams so the driver can be exercised in-process.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace qtt::cli
