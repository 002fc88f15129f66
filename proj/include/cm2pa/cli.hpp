#ifndef CM2PA_CLI_HPP
#define CM2PA_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace cm2pa::cli {

/// Full command-line front end: subcommands simulate, encode, model, check.
/// Returns the process exit code: 0 success, 1 domain error, 2 usage error.
/// Output and error streams are injectable for testing.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace cm2pa::cli

#endif
