#pragma once

#include <iosfwd>

namespace dirac::cli {

enum ExitCode : int {
    kOk = 0,
    kConfig = 2,
    kNoSuchState = 3,
    kNumerical = 4,
    kSweepAborted = 5,
    kVerifyFailed = 6,
    kPrecondition = 7,
};

/// Entry point shared by the executable and the tests. Never throws.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace dirac::cli
