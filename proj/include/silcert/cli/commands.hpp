#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace silcert::cli {

enum ExitCode : int { kExitOk = 0, kExitFailed = 1, kExitInputError = 2 };

// Entry point for the `silcert` tool. `args` excludes the program name.
// Exit codes: 0 pass/success, 1 assessed and failed, 2 input or config error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace silcert::cli
