#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ratiocp {

/// Exit status: 0 success, 1 usage error, 2 data error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ratiocp
