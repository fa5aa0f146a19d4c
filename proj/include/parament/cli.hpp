// cli.hpp — Subcommands simulate | sweep | boundary | fit | oracle

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace parament {

enum ExitCode : int { exit_ok = 0, exit_validation = 1, exit_io = 2, exit_numerical = 3 };

// args excludes the program name. Progress and summaries go to out, diagnostics to err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace parament
