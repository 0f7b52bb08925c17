#pragma once

#include "qoc/model.hpp"
#include "qoc/optimizer.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qoc {

enum class TimeUnit { TauPi, TauG };

// A duration stated in pulse units; seconds() resolves it against the unit
// energy scale.
struct Duration {
    double value = 0.0;
    TimeUnit unit = TimeUnit::TauG;

    double seconds() const { return value * (unit == TimeUnit::TauPi ? kTauPi : kTauG); }

    friend bool operator==(const Duration&, const Duration&) = default;
};

// Everything one run needs, read from a flat key = value file.  Optional
// fields fall back to the per-task defaults.  `task` and `sizes` are
// required in the file; every other key may be omitted.
struct RunConfig {
    Task task = Task::ParallelX;
    std::vector<long> sizes;           // ascending qubit counts
    std::vector<double> deltaJ{0.0};   // a single target (expanded to the
                                       // 0.01-step ladder) or explicit rungs
    std::optional<Duration> duration;
    std::optional<long> bins;
    std::optional<double> ampCap;
    std::optional<long> samples;       // optimization-ensemble size override
    long verificationFactor = 5;
    std::uint64_t seed = 12345;
    std::optional<long> dMax;
    std::optional<double> cutoff;
    long maxIters = 1000;
    double gradTol = 1e-9;
    long memory = 10;
    std::string outDir = ".";
    std::string checkpoint;            // empty: no checkpointing
    long workers = 0;                  // 0: hardware concurrency

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// Parse errors carry the offending line number.  serialize followed by
// parse reproduces the struct exactly.
RunConfig parse_run_config(const std::string& text);
std::string serialize_run_config(const RunConfig& cfg);
RunConfig load_run_config(const std::string& path);

// The error rungs to optimize over: a single delta_j entry expands to the
// 0.01-step ladder ending at that value, an explicit list is used verbatim.
std::vector<double> config_error_rungs(const RunConfig& cfg);

// The build_problem overrides and optimizer settings this config carries.
ProblemOverrides config_overrides(const RunConfig& cfg);
OptimizerConfig config_optimizer(const RunConfig& cfg);

// FNV-1a over the canonical text of the fields that fix the physics a
// schedule was optimized under (task, duration, bins, ampCap, dMax,
// cutoff), as 16 hex digits.  Evaluation-time knobs (delta_j, ensemble
// sizes, seeds, paths) deliberately stay out, so one schedule can be
// re-evaluated under different ensembles.
std::string config_fingerprint(const RunConfig& cfg);

std::uint64_t fnv1a64(std::string_view bytes);

// Shortest-lossless decimal form of a double: every value round-trips
// through text bit-for-bit.
std::string format_double(double v);

} // namespace qoc
