// cli.hpp: entry point of the `rabi` command-line tool
//
// Subcommands: solve | balance | variational | sweep | converge.
// Exit codes: 0 success, 1 usage or configuration error, 2 numerical non-success.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rabi {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumerical = 2;

// args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace rabi
