#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace dispersim::cli {

// Exit codes: 0 success, 1 computational failure, 2 usage or config error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// argv[0] is the program name.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace dispersim::cli
