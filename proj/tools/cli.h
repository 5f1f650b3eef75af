#ifndef CHEMREASON_TOOLS_CLI_H_
#define CHEMREASON_TOOLS_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace chemreason {

// Exit statuses of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitProvider = 3;

// Runs one invocation. args excludes the program name. "-" as a file
// argument reads `in`; results go to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string> &args, std::istream &in,
            std::ostream &out, std::ostream &err);

}  // namespace chemreason

#endif  // CHEMREASON_TOOLS_CLI_H_
