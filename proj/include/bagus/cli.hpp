#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bagus {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

/// Runs the command line `args` (program name excluded).
///
/// Subcommands: estimate, simulate, roc, forecast. Before parsing,
/// `--from-manifest FILE` is replaced by the command and parameters recorded
/// in that manifest, and `--config FILE` by one `--key=value` argument per
/// `key = value` line, placed ahead of the explicit flags so the flags win.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run_cli(int argc, char** argv);

} // namespace bagus
