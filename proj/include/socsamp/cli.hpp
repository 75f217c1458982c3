#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace socsamp {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitRuntime = 2;

/// Subcommands run, sweep, graph, check and replicate. Returns 1 on a
/// configuration or usage error and 2 on a runtime failure.
int run_cli(int argc, char** argv);
/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace socsamp
