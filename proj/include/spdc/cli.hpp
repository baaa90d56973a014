#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace spdc::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitConfig = 2,
    kExitDomain = 3,
    kExitAlias = 4,
};

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace spdc::cli
