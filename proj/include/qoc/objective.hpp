#pragma once

#include "qoc/model.hpp"
#include "qoc/mpo.hpp"
#include "qoc/mps.hpp"
#include "qoc/tebd.hpp"

#include <functional>
#include <utility>
#include <vector>

namespace qoc {

// 1 - |tr(u^dagger target)/2^n|^2.
double gate_infidelity(const MPO& u, const MPO& target);

// 1 - |<psi|target>|^2; both sides must be normalized.
double state_infidelity(const MPS& psi, const MPS& target);

// Infidelity attributed to one gate when meanChi covers gateSpan-qubit gates
// tiled across n qubits: 1 - (1 - meanChi)^(gateSpan/n).
double per_gate_infidelity(double meanChi, long n, int gateSpan);

// Initial and target chains for one control task.  Gate tasks evolve an
// operator starting from the identity; state tasks evolve a ket starting
// from |0...0>.
struct TaskSetup {
    bool gateTask = false;
    MPS initialState;
    MPS targetState;
    MPO initialOperator;
    MPO targetOperator;
};

// The Heisenberg target runs a ground-state search at the problem's bond
// cap; the other three targets are closed-form.
TaskSetup make_setup(const ControlProblem& problem);

// O = <target|final> (trace overlap for operators) together with its exact
// derivative with respect to every control amplitude.
struct OverlapGradient {
    cplx value;
    std::vector<std::vector<cplx>> dx;  // n x L
    std::vector<std::vector<cplx>> dy;
};

// Reads the derivatives off a fully populated tape.  dO/dx[j][l] pairs X_j
// between slices l and l+1, where it commutes with the X layer; dO/dy[j][l]
// pulls the X layer of slice l into the bra and pairs Y_j with the
// intra-slice snapshot, the true position of its exponential.
OverlapGradient overlap_gradient(const MpsTape& tape, const PulseSchedule& schedule);
OverlapGradient overlap_gradient(const MpoTape& tape, const PulseSchedule& schedule);

// Forward, intra-slice, and backward caches in one bundle.
MpsTape build_tape(const MPS& initial, const MPS& target, const PulseSchedule& schedule,
                   const CouplingPattern& coupling, const ParasiticSample& sample, long dMax,
                   double cutoff);
MpoTape build_tape(const MPO& initial, const MPO& target, const PulseSchedule& schedule,
                   const CouplingPattern& coupling, const ParasiticSample& sample, long dMax,
                   double cutoff);

struct ObjectiveValue {
    double meanInfidelity = 0.0;
    std::vector<double> perSample;
    std::vector<cplx> overlapPhases;
};

struct GradientField {
    std::vector<std::vector<double>> gx;  // n x L
    std::vector<std::vector<double>> gy;
};

// Run fn(i) for i in [0, count) on `workers` threads (0 = hardware
// concurrency).  Exceptions are collected and the lowest-index one is
// rethrown after every worker has finished.
void parallel_for(long count, long workers, const std::function<void(long)>& fn);

// Mean infidelity over the sample list and its gradient.  Per-sample
// evaluations run concurrently; the reduction is in fixed sample order, so
// the result is identical at any worker count.
std::pair<ObjectiveValue, GradientField> infidelity_gradient(
    const ControlProblem& problem, const TaskSetup& setup, const PulseSchedule& schedule,
    const std::vector<ParasiticSample>& samples, long workers = 0);

// Convenience wrapper that builds the setup on the fly.
std::pair<ObjectiveValue, GradientField> infidelity_gradient(
    const ControlProblem& problem, const PulseSchedule& schedule,
    const std::vector<ParasiticSample>& samples, long workers = 0);

// Objective only, skipping the tape and the gradient work.
ObjectiveValue evaluate_infidelity(const ControlProblem& problem, const TaskSetup& setup,
                                   const PulseSchedule& schedule,
                                   const std::vector<ParasiticSample>& samples, long workers = 0);

// Max over components of |analytic - central difference| / max(1, |central
// difference|) for the mean infidelity, with half-width `step` per amplitude.
double finite_difference_check(const ControlProblem& problem, const TaskSetup& setup,
                               const PulseSchedule& schedule,
                               const std::vector<ParasiticSample>& samples, double step = 1e-5);

} // namespace qoc
