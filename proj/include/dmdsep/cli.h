#ifndef DMDSEP_CLI_H_
#define DMDSEP_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace dmdsep {

inline constexpr const char* kVersion = "0.1.0";

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntimeError = 1;  // I/O, format, numerical failure
inline constexpr int kExitUsage = 2;         // invalid flags

// Entry point of the `dmdsep` tool; args[0] is the program name.
// Subcommands: separate, synth, bench, iterate.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace dmdsep

#endif  // DMDSEP_CLI_H_
