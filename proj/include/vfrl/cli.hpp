#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vfrl::cli {

enum ExitCode : int { kOk = 0, kUsageError = 1, kRuntimeError = 2 };

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace vfrl::cli
