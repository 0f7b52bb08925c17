#pragma once

#include "qoc/model.hpp"
#include "qoc/objective.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace qoc {

struct WolfeParams {
    double c1 = 1e-4;
    double c2 = 0.9;
    long maxTrials = 40;
};

struct OptimizerConfig {
    long maxIters = 1000;
    long memory = 10;
    double gradTol = 1e-9;  // infinity norm
    WolfeParams lineSearch;
    // Optional projection applied to each accepted point (amplitude caps).
    // When it moves the point, the objective is re-evaluated there and the
    // curvature pair for that step is dropped.
    std::function<void(std::vector<double>&)> project;
};

struct IterationRecord {
    long iter = 0;
    double value = 0.0;
    double gradNorm = 0.0;
    double step = 0.0;
};

enum class StopReason { GradTol, MaxIters, LineSearchFailure, EmptyParameters };

struct MinimizeResult {
    std::vector<double> best;
    double bestValue = 0.0;
    std::vector<IterationRecord> history;  // history[0] is the initial point
    StopReason reason = StopReason::MaxIters;
};

// Objective callback: fills `grad` (resized by the callee to match x) and
// returns the value.
using ObjectiveFn = std::function<double(const std::vector<double>&, std::vector<double>&)>;

// Limited-memory BFGS with a strong-Wolfe line search.  Accepted values are
// monotone nonincreasing; a failed line search returns the best point found
// so far.  Nonfinite callback output aborts with the iteration attached.
MinimizeResult lbfgs_minimize(const ObjectiveFn& eval, std::vector<double> init,
                              const OptimizerConfig& config);

// Parameter vector layout: all x amplitudes row-major by (qubit, bin), then
// all y amplitudes in the same order.
std::vector<double> flatten_schedule(const PulseSchedule& s);
PulseSchedule unflatten_schedule(const std::vector<double>& v, long n, long bins, double dt);

// Grow a schedule to `newN` qubits: existing rows are kept and each appended
// row copies its nearest existing neighbor.  Shrinking is rejected; newN ==
// s.n returns the input unchanged.
PulseSchedule extend_schedule(const PulseSchedule& s, long newN);

// Grow a schedule to `newBins` bins by appending zero-amplitude bins at the
// fixed dt.  Shrinking is rejected.
PulseSchedule pad_bins(const PulseSchedule& s, long newBins);

// Cold-start guess for one problem: the analytic pi pulse plus 1% uniform
// noise for the parallel X gate, a deterministically pre-optimized two-qubit
// pulse replicated across pairs for the parallel CNOT, and near-zero noise
// for state preparation.
PulseSchedule make_initial_guess(const ControlProblem& problem, uint64_t seed);

struct OptimizeOutcome {
    PulseSchedule schedule;
    MinimizeResult result;
    ObjectiveValue objective;  // at the returned schedule, optimization ensemble
};

// Minimize the ensemble-averaged infidelity of one problem starting from
// `init`.  The problem's ensemble fixes the sample list; an ampCap becomes a
// projection onto [-cap, cap].
OptimizeOutcome optimize_problem(const ControlProblem& problem, const TaskSetup& setup,
                                 const PulseSchedule& init, const OptimizerConfig& config,
                                 long workers = 0);

struct LadderPlan {
    std::vector<long> sizes;     // strictly increasing
    std::vector<double> errors;  // strictly increasing, usually starting at 0
};

// 0, 0.01, 0.02, ... up to and including maxDelta.
std::vector<double> error_ladder(double maxDelta);

struct LadderCell {
    PulseSchedule schedule;
    double objective = 0.0;  // optimization-ensemble mean infidelity
    double seedObjective = 0.0;
    bool improved = false;  // optimization beat its seed; otherwise the seed is kept
    long iterations = 0;
    std::vector<IterationRecord> history;  // of the optimization attempt
};

using TaskFactory = std::function<ControlProblem(long n, double deltaJ)>;
using LadderResults = std::map<std::pair<long, double>, LadderCell>;

// Sweep the (size, error) grid in ascending order.  Each cell warm-starts
// from the previous error rung at the same size, or at the base rung from
// the previous size via extend_schedule (bins zero-padded when the new
// problem uses more).  A cell that fails to improve on its seed keeps the
// seed and is flagged.  `onCell` (optional) sees every finished cell in
// order, for checkpointing.  Cells already present in `resume` are adopted
// verbatim (their geometry checked against the factory) instead of being
// re-optimized, so an interrupted sweep continues where it stopped.
LadderResults ladder_optimize(const LadderPlan& plan, const TaskFactory& factory,
                              const OptimizerConfig& config, uint64_t guessSeed,
                              const std::function<void(long, double, const LadderCell&)>& onCell = {},
                              long workers = 0, const LadderResults* resume = nullptr);

} // namespace qoc
