#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fdx::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kInvalidConfig = 1;
inline constexpr int kIoError = 2;
inline constexpr int kViolations = 3;

// Runs the command line `args` (args[0] is the program name) and returns the
// exit code. Results go to `out`, diagnostics to `err`.
//
//   divergence --g SPEC --nu FILE --pi FILE
//   legendre   --g SPEC --pi FILE --h FILE [--oracle none|grid|ascent]
//   bound      --row ROW --pi FILE --h FILE (--d X | --nu FILE)
//              [--lambda X] [--c X] [--gamma X] [--p X] [--theta X]
//   verify     [--rows all|r1,r2] [--instances N] [--seed S] [--dominance]
//              [--csv FILE]
//   pacbayes   --config FILE [--trials-csv FILE]
//   sweep      --row ROW --pi FILE --h FILE (--d X | --nu FILE)
//              --param lambda|c|gamma --from A --to B [--points N] [--log]
//
// Every subcommand except sweep takes --format text|csv|json (default text).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fdx::cli
