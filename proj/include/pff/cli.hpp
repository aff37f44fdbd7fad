#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "pff/solver.hpp"

namespace pff {

/// Fixed-width table of the increments with iterations, cumulative
/// iterations, force and wall time. Non-converged increments are flagged and
/// the footer reports the peak force and totals.
std::string report(const std::vector<IncrementRecord>& records);

enum ExitCode { kExitOk = 0, kExitInputError = 1, kExitNotConverged = 2 };

/// Entry point of the command line driver. `args` excludes the program name.
/// Environment variable PFF_WORKERS sets the default worker count.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pff
