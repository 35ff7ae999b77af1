#pragma once

#include <ostream>
#include <string>

#include "roughdelay/config.hpp"
#include "roughdelay/csv.hpp"

namespace roughdelay {

/// Subcommand bodies, shared between the CLI and the test suites.
/// Return process exit codes: 0 success, 1 invariant failure.
/// Config problems are reported by throwing ConfigError (exit 2 in main).

int run_gen(const Config& cfg, const std::string& out_dir, std::ostream& log);
int run_solve(const Config& cfg, const std::string& out_dir, std::ostream& log);
int run_converge(const Config& cfg, const std::string& out_dir, std::ostream& log);
int run_check(const Config& cfg, std::ostream& log);
int run_bounds(const Config& cfg, std::ostream& log);

} // namespace roughdelay
