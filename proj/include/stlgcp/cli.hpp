#pragma once

#include <string>
#include <vector>

namespace stlgcp {

/// Run the command-line toolkit. Returns the process exit status: 0 when every
/// requested output was written, nonzero on any error.
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);  // args without the program name

}  // namespace stlgcp
