#ifndef PREQUANT_CLI_HPP
#define PREQUANT_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace prequant::cli
{

enum ExitCode : int
{
    exit_ok = 0,
    exit_reject = 1,
    exit_parse_error = 2,
    exit_invalid_input = 3,
};

/**
 * Runs one command. `args` excludes the program name, e.g.
 * {"classify", "--input", "z2.json"}. Reports go to `out` (or --output),
 * diagnostics and log lines to `err`.
 */
int run(std::vector<std::string> const& args, std::ostream& out, std::ostream& err);

} // namespace prequant::cli

#endif
