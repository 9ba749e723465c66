#ifndef UCIMON_CLI_HPP
#define UCIMON_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace ucimon {

/// Runs one command line (program name excluded) and returns the exit code:
/// 0 on success, 1 on invalid input or configuration, 2 on an internal error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ucimon

#endif  // UCIMON_CLI_HPP
