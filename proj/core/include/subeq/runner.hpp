#pragma once

#include <iosfwd>

#include "subeq/config.hpp"

namespace subeq {

/// Dispatches a run configuration to the library and writes CSV/JSON
/// artifacts into the configured output directory.
/// Exit codes: 0 pass/converged, 2 non-convergence or Undetermined verdicts,
/// 3 invalid configuration, 4 internal defect. Diagnostics go to `err`.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace subeq
