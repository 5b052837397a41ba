// Command-line front end. run_cli is the whole program minus process
// plumbing so tests can drive it in-process.
//
// Exit codes: 0 success, 1 usage error, 2 invalid parameters or bad data.

#ifndef DMC_TOOLS_CLI_HPP
#define DMC_TOOLS_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace dmc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInvalid = 2;

/// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace dmc::cli

#endif  // DMC_TOOLS_CLI_HPP
