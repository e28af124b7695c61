#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace edgesim {

// Exit codes: 0 ok, 2 usage/config, 3 infeasible instance, 4 I/O.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInfeasible = 3;
inline constexpr int kExitIo = 4;

// Full command line entry point (argv without the program name). Errors are
// reported as one-line JSON records on `err`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace edgesim
