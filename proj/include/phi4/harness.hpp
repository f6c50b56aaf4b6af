// Experiment orchestration: config-driven verbs, persistence, reporting.
#pragma once

#include <string>

#include "phi4/config.hpp"

namespace phi4 {

// Dispatches to one of {simulate, sample-gibbs, verify-invariance, trees,
// renorm-constants, besov, commutator-scan, diagnostics, calibrate}.  Writes
// outputs plus manifest.json into out_dir.  Returns the process exit code
// (0 iff every verdict passes).
int run_verb(const std::string& verb, const Config& cfg, const std::string& out_dir);

// out_dir resolution: --out argument wins, then PHI4_OUTPUT_DIR, then ".".
std::string resolve_out_dir(const std::string& cli_out);

} // namespace phi4
