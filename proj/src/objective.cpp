#include "qoc/objective.hpp"

#include "chain_ops.hpp"

#include <atomic>
#include <cmath>
#include <complex>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace qoc {

namespace {

Tensor dagger(const Tensor& g) { return g.conjugate().permute({1, 0}); }

Tensor pauli_x_gate() {
    Tensor p({2, 2});
    p.at({0, 1}) = 1.0;
    p.at({1, 0}) = 1.0;
    return p;
}

Tensor pauli_y_gate() {
    Tensor p({2, 2});
    p.at({0, 1}) = cplx(0.0, -1.0);
    p.at({1, 0}) = cplx(0.0, 1.0);
    return p;
}

// Lift a one-site gate to the fused (in, out) physical block of an operator
// site, acting on the out leg: kron(identity, g).
Tensor lift_to_block(const Tensor& g) {
    Tensor t({4, 4});
    for (long i = 0; i < 2; ++i)
        for (long o = 0; o < 2; ++o)
            for (long o2 = 0; o2 < 2; ++o2) t.at({i * 2 + o, i * 2 + o2}) = g.at({o, o2});
    return t;
}

template <class Chain>
OverlapGradient overlap_gradient_impl(const GradientTape<Chain>& tape,
                                      const PulseSchedule& schedule, bool operatorChain) {
    validate_schedule(schedule);
    const long n = schedule.n;
    const long L = schedule.bins;
    if (tape.forward.size() != static_cast<size_t>(L) + 1 ||
        tape.afterVY.size() != static_cast<size_t>(L) ||
        tape.backward.size() != static_cast<size_t>(L) + 1)
        throw std::invalid_argument("overlap_gradient: tape does not match the schedule");

    const double factor = operatorChain ? 0.5 : 1.0;
    const Tensor px = operatorChain ? lift_to_block(pauli_x_gate()) : pauli_x_gate();
    const Tensor py = operatorChain ? lift_to_block(pauli_y_gate()) : pauli_y_gate();

    OverlapGradient g;
    g.value = detail::chain_overlap(tape.backward[static_cast<size_t>(L)].sites,
                                    tape.forward[static_cast<size_t>(L)].sites, factor);
    g.dx.assign(static_cast<size_t>(n), std::vector<cplx>(static_cast<size_t>(L)));
    g.dy.assign(static_cast<size_t>(n), std::vector<cplx>(static_cast<size_t>(L)));
    const cplx prefactor(0.0, -schedule.dt);

    for (long l = 0; l < L; ++l) {
        const auto& bra = tape.backward[static_cast<size_t>(l) + 1].sites;
        const auto& ketX = tape.forward[static_cast<size_t>(l) + 1].sites;
        auto xs = detail::inserted_overlaps(bra, ketX, px, factor);
        for (long j = 0; j < n; ++j)
            g.dx[static_cast<size_t>(j)][static_cast<size_t>(l)] = prefactor * xs[static_cast<size_t>(j)];

        // Move the X layer of this slice into the bra so Y_j lands between
        // the Y and X layers, where its exponential actually sits.
        std::vector<Tensor> braY = bra;
        auto xGates = x_layer(schedule, l);
        for (long j = 0; j < n; ++j) {
            Tensor adj = dagger(xGates[static_cast<size_t>(j)]);
            detail::apply_block_one_site(braY, operatorChain ? lift_to_block(adj) : adj, j);
        }
        auto ys = detail::inserted_overlaps(braY, tape.afterVY[static_cast<size_t>(l)].sites, py,
                                            factor);
        for (long j = 0; j < n; ++j)
            g.dy[static_cast<size_t>(j)][static_cast<size_t>(l)] = prefactor * ys[static_cast<size_t>(j)];
    }
    return g;
}

template <class Chain>
GradientTape<Chain> build_tape_impl(const Chain& initial, const Chain& target,
                                    const PulseSchedule& schedule,
                                    const CouplingPattern& coupling,
                                    const ParasiticSample& sample, long dMax, double cutoff) {
    auto forward = propagate(initial, schedule, coupling, sample, dMax, cutoff, true);
    GradientTape<Chain> tape = std::move(*forward.tape);
    tape.backward = propagate_backward(target, schedule, coupling, sample, dMax, cutoff);
    return tape;
}

struct SampleResult {
    double chi = 0.0;
    cplx overlap;
    std::vector<std::vector<double>> gx, gy;
};

void check_problem_schedule(const ControlProblem& problem, const PulseSchedule& schedule) {
    validate_schedule(schedule);
    if (schedule.n != problem.n)
        throw std::invalid_argument("objective: schedule size does not match the problem");
}

SampleResult gradient_for_sample(const ControlProblem& problem, const TaskSetup& setup,
                                 const PulseSchedule& schedule, const ParasiticSample& sample) {
    OverlapGradient og;
    if (setup.gateTask) {
        MpoTape tape = build_tape(setup.initialOperator, setup.targetOperator, schedule,
                                  problem.coupling, sample, problem.dMax, problem.cutoff);
        og = overlap_gradient(tape, schedule);
    } else {
        MpsTape tape = build_tape(setup.initialState, setup.targetState, schedule,
                                  problem.coupling, sample, problem.dMax, problem.cutoff);
        og = overlap_gradient(tape, schedule);
    }
    SampleResult r;
    r.overlap = og.value;
    r.chi = 1.0 - std::norm(og.value);
    const long n = schedule.n;
    const long L = schedule.bins;
    r.gx.assign(static_cast<size_t>(n), std::vector<double>(static_cast<size_t>(L)));
    r.gy = r.gx;
    for (long j = 0; j < n; ++j)
        for (long l = 0; l < L; ++l) {
            const auto ju = static_cast<size_t>(j);
            const auto lu = static_cast<size_t>(l);
            r.gx[ju][lu] = -2.0 * std::real(std::conj(og.value) * og.dx[ju][lu]);
            r.gy[ju][lu] = -2.0 * std::real(std::conj(og.value) * og.dy[ju][lu]);
        }
    return r;
}

cplx overlap_for_sample(const ControlProblem& problem, const TaskSetup& setup,
                        const PulseSchedule& schedule, const ParasiticSample& sample) {
    if (setup.gateTask) {
        auto prop = propagate(setup.initialOperator, schedule, problem.coupling, sample,
                              problem.dMax, problem.cutoff);
        return trace_overlap(setup.targetOperator, prop.final);
    }
    auto prop = propagate(setup.initialState, schedule, problem.coupling, sample, problem.dMax,
                          problem.cutoff);
    return overlap(setup.targetState, prop.final);
}

} // namespace

double gate_infidelity(const MPO& u, const MPO& target) {
    return 1.0 - std::norm(trace_overlap(u, target));
}

double state_infidelity(const MPS& psi, const MPS& target) {
    return 1.0 - std::norm(overlap(psi, target));
}

double per_gate_infidelity(double meanChi, long n, int gateSpan) {
    if (n < 1) throw std::invalid_argument("per_gate_infidelity: need n >= 1");
    if (gateSpan != 1 && gateSpan != 2)
        throw std::invalid_argument("per_gate_infidelity: gate span must be 1 or 2");
    if (!(meanChi >= 0.0) || meanChi >= 1.0)
        throw std::invalid_argument("per_gate_infidelity: mean infidelity must lie in [0, 1)");
    return 1.0 - std::pow(1.0 - meanChi, static_cast<double>(gateSpan) / static_cast<double>(n));
}

TaskSetup make_setup(const ControlProblem& problem) {
    TaskSetup setup;
    switch (problem.task) {
    case Task::ParallelX:
        setup.gateTask = true;
        setup.initialOperator = identity_mpo(problem.n);
        setup.targetOperator = parallel_x_mpo(problem.n);
        break;
    case Task::ParallelCNOT:
        setup.gateTask = true;
        setup.initialOperator = identity_mpo(problem.n);
        setup.targetOperator = parallel_cnot_mpo(problem.n);
        break;
    case Task::GHZPrep:
        setup.initialState = product_state(std::vector<int>(static_cast<size_t>(problem.n), 0));
        setup.targetState = ghz_state(problem.n);
        break;
    case Task::HeisenbergGroundPrep: {
        setup.initialState = product_state(std::vector<int>(static_cast<size_t>(problem.n), 0));
        DmrgResult ground = dmrg_ground_state(heisenberg_mpo(problem.n), problem.dMax, 20, 1e-12);
        setup.targetState = std::move(ground.state);
        break;
    }
    }
    return setup;
}

OverlapGradient overlap_gradient(const MpsTape& tape, const PulseSchedule& schedule) {
    return overlap_gradient_impl(tape, schedule, false);
}

OverlapGradient overlap_gradient(const MpoTape& tape, const PulseSchedule& schedule) {
    return overlap_gradient_impl(tape, schedule, true);
}

MpsTape build_tape(const MPS& initial, const MPS& target, const PulseSchedule& schedule,
                   const CouplingPattern& coupling, const ParasiticSample& sample, long dMax,
                   double cutoff) {
    return build_tape_impl(initial, target, schedule, coupling, sample, dMax, cutoff);
}

MpoTape build_tape(const MPO& initial, const MPO& target, const PulseSchedule& schedule,
                   const CouplingPattern& coupling, const ParasiticSample& sample, long dMax,
                   double cutoff) {
    return build_tape_impl(initial, target, schedule, coupling, sample, dMax, cutoff);
}

void parallel_for(long count, long workers, const std::function<void(long)>& fn) {
    if (count <= 0) return;
    if (workers <= 0) workers = static_cast<long>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
    if (workers > count) workers = count;
    if (workers == 1) {
        for (long i = 0; i < count; ++i) fn(i);
        return;
    }

    std::atomic<long> next{0};
    std::mutex errorMutex;
    long errorIndex = -1;
    std::exception_ptr error;
    auto drain = [&] {
        for (;;) {
            const long i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(errorMutex);
                if (errorIndex < 0 || i < errorIndex) {
                    errorIndex = i;
                    error = std::current_exception();
                }
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (long w = 0; w < workers; ++w) pool.emplace_back(drain);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

std::pair<ObjectiveValue, GradientField> infidelity_gradient(
    const ControlProblem& problem, const TaskSetup& setup, const PulseSchedule& schedule,
    const std::vector<ParasiticSample>& samples, long workers) {
    check_problem_schedule(problem, schedule);
    if (samples.empty()) throw std::invalid_argument("infidelity_gradient: empty sample list");

    const long m = static_cast<long>(samples.size());
    std::vector<SampleResult> results(static_cast<size_t>(m));
    parallel_for(m, workers, [&](long s) {
        try {
            results[static_cast<size_t>(s)] =
                gradient_for_sample(problem, setup, schedule, samples[static_cast<size_t>(s)]);
        } catch (const std::exception& e) {
            throw std::runtime_error("sample " + std::to_string(s) + ": " + e.what());
        }
    });

    const long n = schedule.n;
    const long L = schedule.bins;
    ObjectiveValue value;
    value.perSample.reserve(static_cast<size_t>(m));
    value.overlapPhases.reserve(static_cast<size_t>(m));
    GradientField grad;
    grad.gx.assign(static_cast<size_t>(n), std::vector<double>(static_cast<size_t>(L), 0.0));
    grad.gy = grad.gx;

    double chiSum = 0.0;
    for (const auto& r : results) {
        value.perSample.push_back(r.chi);
        value.overlapPhases.push_back(r.overlap);
        chiSum += r.chi;
        for (long j = 0; j < n; ++j)
            for (long l = 0; l < L; ++l) {
                const auto ju = static_cast<size_t>(j);
                const auto lu = static_cast<size_t>(l);
                grad.gx[ju][lu] += r.gx[ju][lu];
                grad.gy[ju][lu] += r.gy[ju][lu];
            }
    }
    value.meanInfidelity = chiSum / static_cast<double>(m);
    for (long j = 0; j < n; ++j)
        for (long l = 0; l < L; ++l) {
            grad.gx[static_cast<size_t>(j)][static_cast<size_t>(l)] /= static_cast<double>(m);
            grad.gy[static_cast<size_t>(j)][static_cast<size_t>(l)] /= static_cast<double>(m);
        }
    return {std::move(value), std::move(grad)};
}

std::pair<ObjectiveValue, GradientField> infidelity_gradient(
    const ControlProblem& problem, const PulseSchedule& schedule,
    const std::vector<ParasiticSample>& samples, long workers) {
    return infidelity_gradient(problem, make_setup(problem), schedule, samples, workers);
}

ObjectiveValue evaluate_infidelity(const ControlProblem& problem, const TaskSetup& setup,
                                   const PulseSchedule& schedule,
                                   const std::vector<ParasiticSample>& samples, long workers) {
    check_problem_schedule(problem, schedule);
    if (samples.empty()) throw std::invalid_argument("evaluate_infidelity: empty sample list");

    const long m = static_cast<long>(samples.size());
    std::vector<cplx> overlaps(static_cast<size_t>(m));
    parallel_for(m, workers, [&](long s) {
        try {
            overlaps[static_cast<size_t>(s)] =
                overlap_for_sample(problem, setup, schedule, samples[static_cast<size_t>(s)]);
        } catch (const std::exception& e) {
            throw std::runtime_error("sample " + std::to_string(s) + ": " + e.what());
        }
    });

    ObjectiveValue value;
    value.perSample.reserve(static_cast<size_t>(m));
    value.overlapPhases = overlaps;
    double chiSum = 0.0;
    for (const cplx& o : overlaps) {
        const double chi = 1.0 - std::norm(o);
        value.perSample.push_back(chi);
        chiSum += chi;
    }
    value.meanInfidelity = chiSum / static_cast<double>(m);
    return value;
}

double finite_difference_check(const ControlProblem& problem, const TaskSetup& setup,
                               const PulseSchedule& schedule,
                               const std::vector<ParasiticSample>& samples, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("finite_difference_check: need step > 0");
    auto [value, grad] = infidelity_gradient(problem, setup, schedule, samples);
    (void)value;

    PulseSchedule probe = schedule;
    double worst = 0.0;
    auto check_component = [&](std::vector<std::vector<double>>& field, long j, long l,
                               double analytic) {
        double& amp = field[static_cast<size_t>(j)][static_cast<size_t>(l)];
        const double saved = amp;
        amp = saved + step;
        const double up = evaluate_infidelity(problem, setup, probe, samples).meanInfidelity;
        amp = saved - step;
        const double down = evaluate_infidelity(problem, setup, probe, samples).meanInfidelity;
        amp = saved;
        const double fd = (up - down) / (2.0 * step);
        const double rel = std::abs(analytic - fd) / std::max(1.0, std::abs(fd));
        if (rel > worst) worst = rel;
    };
    for (long j = 0; j < schedule.n; ++j)
        for (long l = 0; l < schedule.bins; ++l) {
            check_component(probe.x, j, l, grad.gx[static_cast<size_t>(j)][static_cast<size_t>(l)]);
            check_component(probe.y, j, l, grad.gy[static_cast<size_t>(j)][static_cast<size_t>(l)]);
        }
    return worst;
}

} // namespace qoc
