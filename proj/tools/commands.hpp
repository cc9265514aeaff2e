#ifndef AQCSIM_COMMANDS_HPP
#define AQCSIM_COMMANDS_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace aqcsim {

// Exit codes: 0 success, 2 invalid input, 3 numerical-accuracy failure,
// 4 generation failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidInput = 2;
inline constexpr int kExitAccuracy = 3;
inline constexpr int kExitGeneration = 4;

// Runs one CLI invocation; args excludes the program name.  Everything the
// command prints goes to `out`, diagnostics to `err`.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace aqcsim

#endif
