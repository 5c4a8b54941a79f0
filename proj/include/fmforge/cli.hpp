#pragma once

#include <string>
#include <vector>

namespace fmforge::cli {

// Full command-line surface. Returns the process exit code:
// 0 success, 1 configuration error, 2 numerical failure.
int run(const std::vector<std::string>& args);

}  // namespace fmforge::cli
