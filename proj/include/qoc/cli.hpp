#pragma once

#include "qoc/config.hpp"

#include <string>

namespace qoc {

// The five subcommands.  Each returns 0 on success and signals problems by
// throwing: std::invalid_argument for configuration and input-file errors
// (exit code 1 at the entry point), anything else for numerical failures
// (exit code 2).

// Runs the warm-started (size, error-rung) ladder, writing per-cell schedule
// files, iteration-history CSVs, and summary records with optimization- and
// verification-ensemble infidelities.  With a checkpoint path configured the
// finished cells are saved after every cell; `resume` adopts them.
int cmd_optimize(const RunConfig& cfg, bool resume);

// Re-evaluates a stored schedule on a freshly seeded verification ensemble
// at the config's delta_j, reporting mean infidelity, standard error, a
// half-ensemble consistency check, and the per-gate infidelity for gate
// tasks.  The schedule's config fingerprint must match.
int cmd_evaluate(const RunConfig& cfg, const std::string& schedulePath);

// Ladder-optimizes every size, then writes one CSV row per (size, robust
// flag): both the base-rung and top-rung schedules evaluated on the same
// verification ensemble at the target error.
int cmd_sweep(const RunConfig& cfg, bool resume);

// Writes the x and y amplitude matrices (rows = qubits, columns = bins) of
// a stored schedule as two CSVs with a unit and timescale header.  An empty
// outDir puts them next to the schedule file.
int cmd_heatmap(const std::string& schedulePath, const std::string& outDir);

// Verification report: compares the analytic gradient against central
// finite differences and the tensor-network propagation against the dense
// oracle, at truncation-free bond dimension.  Sizes are capped at n <= 5.
int cmd_gradcheck(const RunConfig& cfg);

} // namespace qoc
