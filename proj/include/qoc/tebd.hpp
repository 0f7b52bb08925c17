#pragma once

#include "qoc/model.hpp"
#include "qoc/mpo.hpp"
#include "qoc/mps.hpp"

#include <optional>
#include <vector>

namespace qoc {

// One control bin as a circuit.  Applied to a ket: every bond gate from bond
// 0 upward, then the Y layer, then the X layer.
struct SliceCircuit {
    std::vector<Tensor> vGates;
    std::vector<Tensor> yGates;
    std::vector<Tensor> xGates;
};

SliceCircuit build_slice(const PulseSchedule& schedule, long l, const CouplingPattern& coupling,
                         const ParasiticSample& sample);

// The X layer alone; it depends only on the schedule.
std::vector<Tensor> x_layer(const PulseSchedule& schedule, long l);

// Everything the gradient needs from a propagation.  Indices are slice
// counts: forward[k] is the state after k slices, afterVY[l] is slice l
// caught between its Y and X layers, and backward[k] is the target pulled
// back through slices k..L-1 (so backward[L] is the target itself).
template <class Chain>
struct GradientTape {
    std::vector<Chain> forward;
    std::vector<Chain> afterVY;
    std::vector<Chain> backward;
};

using MpsTape = GradientTape<MPS>;
using MpoTape = GradientTape<MPO>;

template <class Chain>
struct Propagation {
    Chain final;
    std::optional<GradientTape<Chain>> tape;  // forward and afterVY only
    double discardedWeight = 0.0;
};

Propagation<MPS> propagate(const MPS& initial, const PulseSchedule& schedule,
                           const CouplingPattern& coupling, const ParasiticSample& sample,
                           long dMax, double cutoff, bool keepTape = false);
Propagation<MPO> propagate(const MPO& initial, const PulseSchedule& schedule,
                           const CouplingPattern& coupling, const ParasiticSample& sample,
                           long dMax, double cutoff, bool keepTape = false);

// backward[k] for k = 0..L, truncated with the same policy as the forward
// pass.
std::vector<MPS> propagate_backward(const MPS& target, const PulseSchedule& schedule,
                                    const CouplingPattern& coupling,
                                    const ParasiticSample& sample, long dMax, double cutoff);
std::vector<MPO> propagate_backward(const MPO& target, const PulseSchedule& schedule,
                                    const CouplingPattern& coupling,
                                    const ParasiticSample& sample, long dMax, double cutoff);

} // namespace qoc
