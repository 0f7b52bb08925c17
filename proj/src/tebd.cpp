#include "qoc/tebd.hpp"

#include <stdexcept>
#include <string>
#include <utility>

namespace qoc {

namespace {

Tensor dagger(const Tensor& gate) { return gate.conjugate().permute({1, 0}); }

void check_slice_inputs(const PulseSchedule& schedule, const CouplingPattern& coupling,
                        const ParasiticSample& sample) {
    validate_schedule(schedule);
    const size_t bonds = static_cast<size_t>(schedule.n - 1);
    if (coupling.g.size() != bonds)
        throw std::invalid_argument("tebd: coupling pattern does not match the qubit count");
    if (sample.jx.size() != bonds || sample.jy.size() != bonds || sample.jz.size() != bonds)
        throw std::invalid_argument("tebd: parasitic sample does not match the qubit count");
}

template <class Chain> struct ChainOps;

template <> struct ChainOps<MPS> {
    static void one_site(MPS& c, const Tensor& g, long site) {
        c = apply_one_site(std::move(c), g, site);
    }
    static double two_site(MPS& c, const Tensor& g, long bond, long dMax, double cutoff) {
        auto [next, rep] = apply_two_site(std::move(c), g, bond, dMax, cutoff);
        c = std::move(next);
        return rep.discardedWeight;
    }
};

template <> struct ChainOps<MPO> {
    static void one_site(MPO& c, const Tensor& g, long site) {
        c = mpo_apply_one_site(std::move(c), g, site);
    }
    static double two_site(MPO& c, const Tensor& g, long bond, long dMax, double cutoff) {
        auto [next, rep] = mpo_apply_two_site(std::move(c), g, bond, dMax, cutoff);
        c = std::move(next);
        return rep.discardedWeight;
    }
};

template <class Chain>
void apply_slice(Chain& c, const SliceCircuit& s, long dMax, double cutoff, double& discarded,
                 Chain* midVY) {
    const long n = c.length();
    for (long j = 0; j + 1 < n; ++j)
        discarded += ChainOps<Chain>::two_site(c, s.vGates[static_cast<size_t>(j)], j, dMax, cutoff);
    for (long j = 0; j < n; ++j) ChainOps<Chain>::one_site(c, s.yGates[static_cast<size_t>(j)], j);
    if (midVY) *midVY = c;
    for (long j = 0; j < n; ++j) ChainOps<Chain>::one_site(c, s.xGates[static_cast<size_t>(j)], j);
}

template <class Chain>
void apply_slice_adjoint(Chain& c, const SliceCircuit& s, long dMax, double cutoff,
                         double& discarded) {
    const long n = c.length();
    for (long j = 0; j < n; ++j)
        ChainOps<Chain>::one_site(c, dagger(s.xGates[static_cast<size_t>(j)]), j);
    for (long j = 0; j < n; ++j)
        ChainOps<Chain>::one_site(c, dagger(s.yGates[static_cast<size_t>(j)]), j);
    for (long j = n - 2; j >= 0; --j)
        discarded +=
            ChainOps<Chain>::two_site(c, dagger(s.vGates[static_cast<size_t>(j)]), j, dMax, cutoff);
}

template <class Chain>
Propagation<Chain> propagate_impl(const Chain& initial, const PulseSchedule& schedule,
                                  const CouplingPattern& coupling, const ParasiticSample& sample,
                                  long dMax, double cutoff, bool keepTape) {
    check_slice_inputs(schedule, coupling, sample);
    if (initial.length() != schedule.n)
        throw std::invalid_argument("propagate: chain length does not match the schedule");
    if (dMax < 2) throw std::invalid_argument("propagate: dMax must be at least 2");
    if (!(cutoff >= 0.0)) throw std::invalid_argument("propagate: cutoff must be >= 0");

    Propagation<Chain> out;
    out.final = initial;
    if (keepTape) {
        out.tape.emplace();
        out.tape->forward.reserve(static_cast<size_t>(schedule.bins + 1));
        out.tape->afterVY.reserve(static_cast<size_t>(schedule.bins));
        out.tape->forward.push_back(initial);
    }
    for (long l = 0; l < schedule.bins; ++l) {
        SliceCircuit slice = build_slice(schedule, l, coupling, sample);
        Chain mid;
        apply_slice(out.final, slice, dMax, cutoff, out.discardedWeight,
                    keepTape ? &mid : nullptr);
        if (keepTape) {
            out.tape->afterVY.push_back(std::move(mid));
            out.tape->forward.push_back(out.final);
        }
    }
    return out;
}

template <class Chain>
std::vector<Chain> propagate_backward_impl(const Chain& target, const PulseSchedule& schedule,
                                           const CouplingPattern& coupling,
                                           const ParasiticSample& sample, long dMax,
                                           double cutoff) {
    check_slice_inputs(schedule, coupling, sample);
    if (target.length() != schedule.n)
        throw std::invalid_argument("propagate_backward: chain length does not match the schedule");
    if (dMax < 2) throw std::invalid_argument("propagate_backward: dMax must be at least 2");
    if (!(cutoff >= 0.0)) throw std::invalid_argument("propagate_backward: cutoff must be >= 0");

    std::vector<Chain> back(static_cast<size_t>(schedule.bins + 1));
    back[static_cast<size_t>(schedule.bins)] = target;
    double discarded = 0.0;
    for (long l = schedule.bins - 1; l >= 0; --l) {
        Chain c = back[static_cast<size_t>(l + 1)];
        apply_slice_adjoint(c, build_slice(schedule, l, coupling, sample), dMax, cutoff, discarded);
        back[static_cast<size_t>(l)] = std::move(c);
    }
    return back;
}

} // namespace

std::vector<Tensor> x_layer(const PulseSchedule& schedule, long l) {
    if (l < 0 || l >= schedule.bins)
        throw std::invalid_argument("x_layer: bin " + std::to_string(l) + " out of range");
    std::vector<Tensor> gates;
    gates.reserve(static_cast<size_t>(schedule.n));
    for (long j = 0; j < schedule.n; ++j)
        gates.push_back(single_quadrature_gate(
            schedule.x[static_cast<size_t>(j)][static_cast<size_t>(l)], schedule.dt, Quadrature::X));
    return gates;
}

SliceCircuit build_slice(const PulseSchedule& schedule, long l, const CouplingPattern& coupling,
                         const ParasiticSample& sample) {
    check_slice_inputs(schedule, coupling, sample);
    if (l < 0 || l >= schedule.bins)
        throw std::invalid_argument("build_slice: bin " + std::to_string(l) + " out of range");

    SliceCircuit s;
    s.vGates.reserve(static_cast<size_t>(schedule.n - 1));
    for (size_t b = 0; b + 1 < static_cast<size_t>(schedule.n); ++b)
        s.vGates.push_back(
            bond_gate(coupling.g[b], sample.jx[b], sample.jy[b], sample.jz[b], schedule.dt));
    s.yGates.reserve(static_cast<size_t>(schedule.n));
    for (long j = 0; j < schedule.n; ++j)
        s.yGates.push_back(single_quadrature_gate(
            schedule.y[static_cast<size_t>(j)][static_cast<size_t>(l)], schedule.dt, Quadrature::Y));
    s.xGates = x_layer(schedule, l);
    return s;
}

Propagation<MPS> propagate(const MPS& initial, const PulseSchedule& schedule,
                           const CouplingPattern& coupling, const ParasiticSample& sample,
                           long dMax, double cutoff, bool keepTape) {
    return propagate_impl(initial, schedule, coupling, sample, dMax, cutoff, keepTape);
}

Propagation<MPO> propagate(const MPO& initial, const PulseSchedule& schedule,
                           const CouplingPattern& coupling, const ParasiticSample& sample,
                           long dMax, double cutoff, bool keepTape) {
    return propagate_impl(initial, schedule, coupling, sample, dMax, cutoff, keepTape);
}

std::vector<MPS> propagate_backward(const MPS& target, const PulseSchedule& schedule,
                                    const CouplingPattern& coupling,
                                    const ParasiticSample& sample, long dMax, double cutoff) {
    return propagate_backward_impl(target, schedule, coupling, sample, dMax, cutoff);
}

std::vector<MPO> propagate_backward(const MPO& target, const PulseSchedule& schedule,
                                    const CouplingPattern& coupling,
                                    const ParasiticSample& sample, long dMax, double cutoff) {
    return propagate_backward_impl(target, schedule, coupling, sample, dMax, cutoff);
}

} // namespace qoc
