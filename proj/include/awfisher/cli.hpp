#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace awfisher {

/// Process exit codes of the awfisher tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 2,
    kExitData = 3,
    kExitNumeric = 4,
};

/// Runs the awfisher command line with argv[0] as the program name.
int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Parses "start:stop:step" (inclusive) or a comma list of positive integers.
std::vector<unsigned long long> parse_grid(const std::string& spec);

}  // namespace awfisher
