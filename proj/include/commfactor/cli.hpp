#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace commfactor {

// exit codes of the command-line front end
enum ExitCode : int { kExitOk = 0, kExitParse = 1, kExitNumeric = 2, kExitObstruction = 3, kExitMismatch = 4 };

// Runs one subcommand (det, factor, verify, demo-descent). args excludes the
// program name. Flags may also come from COMMFACTOR_* environment variables;
// the command line wins.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace commfactor
