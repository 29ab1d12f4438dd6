#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fracsys {

enum ExitCode : int { kExitOk = 0, kExitInvalidInput = 2, kExitNonConvergence = 3 };

/// Runs the command line `fracsys <args...>`; args exclude the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fracsys
