#pragma once

#include <iosfwd>

#include "dfrkit/cli/config.hpp"

namespace dfr::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitViolation = 2;

/// Executes one pipeline. The primary artifact goes to config.out when set
/// (with a summary on `out`), otherwise to `out`. Returns 0 when the run
/// completed cleanly, 2 when a discrete-DFR violation or a counterexample
/// was found, 1 on error (message on `err`).
int run(const ExperimentConfig& config, std::ostream& out, std::ostream& err);

}  // namespace dfr::cli
