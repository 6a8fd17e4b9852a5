#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wildqr {

inline constexpr const char* kCliVersion = "0.1.0";

// Full command-line surface, in-process for testability. Exit codes: 0
// success, 2 usage error, 3 data error, 4 numerical failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wildqr
