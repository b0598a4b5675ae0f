// Command-line front end. `run_cli` takes the arguments after the program
// name and returns the process exit code.

#ifndef WSC_TOOLS_CLI_HPP
#define WSC_TOOLS_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace wsc::cli {

enum ExitCode : int { kSuccess = 0, kUsage = 1, kDataError = 2, kNumericalError = 3 };

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Reads a flat `key = value` file ('#' starts a comment) into `--key=value`
// arguments. Throws std::runtime_error on malformed lines.
std::vector<std::string> read_config(const std::string& path);

}  // namespace wsc::cli

#endif  // WSC_TOOLS_CLI_HPP
