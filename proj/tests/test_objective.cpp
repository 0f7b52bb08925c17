#include <doctest.h>
#include "oracles.hpp"

#include "qoc/model.hpp"
#include "qoc/objective.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

using namespace qoc;

namespace {

PulseSchedule random_schedule(long n, long bins, double dt, uint64_t seed) {
    PulseSchedule s = zero_schedule(n, bins, dt);
    oracle::Rng rng(seed);
    for (long j = 0; j < n; ++j)
        for (long l = 0; l < bins; ++l) {
            s.x[static_cast<size_t>(j)][static_cast<size_t>(l)] = rng.real(-1.0, 1.0);
            s.y[static_cast<size_t>(j)][static_cast<size_t>(l)] = rng.real(-1.0, 1.0);
        }
    return s;
}

std::vector<ParasiticSample> random_samples(long n, double deltaJ, long m, uint64_t seed) {
    EnsembleSpec spec;
    spec.deltaJ = deltaJ;
    spec.m = m;
    spec.nJ = 3 * (n - 1);
    spec.seed = seed;
    return sample_ensemble(spec, n);
}

double heisenberg_ground_energy_dense(long n) {
    const long dim = 1L << n;
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
    for (long b = 0; b + 1 < n; ++b) {
        h += oracle::embed_two_site(oracle::kron(oracle::pauli_x(), oracle::pauli_x()), b, n);
        h += oracle::embed_two_site(oracle::kron(oracle::pauli_y(), oracle::pauli_y()), b, n);
        h += oracle::embed_two_site(oracle::kron(oracle::pauli_z(), oracle::pauli_z()), b, n);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
    return solver.eigenvalues()(0);
}

PulseSchedule empty_schedule(long n) {
    PulseSchedule s;
    s.n = n;
    s.bins = 0;
    s.dt = 0.1;
    s.x.assign(static_cast<size_t>(n), {});
    s.y.assign(static_cast<size_t>(n), {});
    return s;
}

} // namespace

TEST_SUITE("objective") {

TEST_CASE("gate infidelity hits its closed-form anchors") {
    MPO target = parallel_x_mpo(3);
    CHECK(std::abs(gate_infidelity(target, target)) < 1e-15);

    MPO phased = target;
    phased.sites[1] *= std::polar(1.0, 0.7);
    CHECK(std::abs(gate_infidelity(phased, target)) < 1e-14);

    CHECK(gate_infidelity(identity_mpo(3), target) == doctest::Approx(1.0));
    CHECK_THROWS_AS((void)trace_overlap(identity_mpo(3), identity_mpo(4)), std::invalid_argument);
}

TEST_CASE("state infidelity hits its closed-form anchors") {
    MPS zeros = product_state({0, 0, 0, 0});
    CHECK(std::abs(state_infidelity(zeros, zeros)) < 1e-15);
    CHECK(state_infidelity(zeros, product_state({1, 0, 0, 0})) == doctest::Approx(1.0));
    CHECK(state_infidelity(zeros, ghz_state(4)) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("per-gate infidelity matches the n=50 reference points") {
    CHECK(per_gate_infidelity(5.0e-3, 50, 1) == doctest::Approx(1.0e-4).epsilon(0.01));
    CHECK(per_gate_infidelity(2.7e-2, 50, 2) == doctest::Approx(1.1e-3).epsilon(0.01));
    CHECK(per_gate_infidelity(0.0, 7, 1) == 0.0);

    CHECK_THROWS_AS((void)per_gate_infidelity(1.0, 50, 1), std::invalid_argument);
    CHECK_THROWS_AS((void)per_gate_infidelity(-0.1, 50, 1), std::invalid_argument);
    CHECK_THROWS_AS((void)per_gate_infidelity(0.5, 50, 3), std::invalid_argument);
}

TEST_CASE("task setups pair the right initial and target chains") {
    ControlProblem px = build_problem(Task::ParallelX, 4, 0.0);
    TaskSetup sx = make_setup(px);
    CHECK(sx.gateTask);
    CHECK(std::abs(trace_overlap(sx.initialOperator, identity_mpo(4)) - 1.0) < 1e-14);
    CHECK(std::abs(trace_overlap(sx.targetOperator, parallel_x_mpo(4)) - 1.0) < 1e-14);

    ControlProblem cnot = build_problem(Task::ParallelCNOT, 4, 0.0);
    TaskSetup sc = make_setup(cnot);
    CHECK(sc.gateTask);
    CHECK(std::abs(trace_overlap(sc.targetOperator, parallel_cnot_mpo(4)) - 1.0) < 1e-14);

    ControlProblem ghz = build_problem(Task::GHZPrep, 4, 0.0);
    TaskSetup sg = make_setup(ghz);
    CHECK_FALSE(sg.gateTask);
    CHECK(std::abs(overlap(sg.initialState, product_state({0, 0, 0, 0})) - 1.0) < 1e-14);
    CHECK(std::abs(std::abs(overlap(sg.targetState, ghz_state(4))) - 1.0) < 1e-14);

    ControlProblem heis = build_problem(Task::HeisenbergGroundPrep, 4, 0.0);
    TaskSetup sh = make_setup(heis);
    CHECK_FALSE(sh.gateTask);
    const double energy = expectation(sh.targetState, heisenberg_mpo(4));
    CHECK(energy == doctest::Approx(heisenberg_ground_energy_dense(4)).epsilon(1e-8));
}

TEST_CASE("pi pulse is a stationary point of the parallel-X objective") {
    ControlProblem problem = build_problem(Task::ParallelX, 2, 0.0);
    PulseSchedule pulse = pi_pulse_schedule(2, 5);
    auto [value, grad] = infidelity_gradient(problem, pulse, random_samples(2, 0.0, 1, 1));

    CHECK(value.meanInfidelity < 1e-10);
    for (long j = 0; j < 2; ++j)
        for (long l = 0; l < 5; ++l) {
            CHECK(std::abs(grad.gx[static_cast<size_t>(j)][static_cast<size_t>(l)]) < 1e-10);
            CHECK(std::abs(grad.gy[static_cast<size_t>(j)][static_cast<size_t>(l)]) < 1e-10);
        }
}

TEST_CASE("operator-task gradient matches central finite differences") {
    ControlProblem problem;
    {
        ProblemOverrides ov;
        ov.bins = 3;
        ov.totalTime = 0.6;
        ov.dMax = 64;
        ov.cutoff = 0.0;
        problem = build_problem(Task::ParallelCNOT, 4, 0.05, ov);
    }
    TaskSetup setup = make_setup(problem);
    PulseSchedule s = random_schedule(4, 3, problem.schedule.dt, 31);
    auto samples = random_samples(4, 0.05, 1, 77);

    CHECK(finite_difference_check(problem, setup, s, samples) < 1e-6);
}

TEST_CASE("state-task gradient matches central finite differences") {
    ControlProblem problem;
    {
        ProblemOverrides ov;
        ov.bins = 3;
        ov.totalTime = 0.9;
        ov.dMax = 64;
        ov.cutoff = 0.0;
        problem = build_problem(Task::GHZPrep, 4, 0.05, ov);
    }
    TaskSetup setup = make_setup(problem);
    PulseSchedule s = random_schedule(4, 3, problem.schedule.dt, 32);
    auto samples = random_samples(4, 0.05, 1, 78);

    CHECK(finite_difference_check(problem, setup, s, samples) < 1e-6);
}

TEST_CASE("ensemble-mean gradient matches finite differences of the mean") {
    ControlProblem problem;
    {
        ProblemOverrides ov;
        ov.bins = 3;
        ov.totalTime = 0.6;
        ov.dMax = 64;
        ov.cutoff = 0.0;
        problem = build_problem(Task::ParallelX, 4, 0.05, ov);
    }
    TaskSetup setup = make_setup(problem);
    PulseSchedule s = random_schedule(4, 3, problem.schedule.dt, 33);
    auto samples = random_samples(4, 0.05, 6, 79);
    REQUIRE(samples.size() == 6);

    CHECK(finite_difference_check(problem, setup, s, samples) < 1e-6);
}

TEST_CASE("global phase on the target moves nothing") {
    ControlProblem problem;
    {
        ProblemOverrides ov;
        ov.bins = 2;
        ov.totalTime = 0.4;
        problem = build_problem(Task::ParallelX, 3, 0.05, ov);
    }
    TaskSetup setup = make_setup(problem);
    TaskSetup phased = setup;
    phased.targetOperator.sites[1] *= std::polar(1.0, 1.234);

    PulseSchedule s = random_schedule(3, 2, problem.schedule.dt, 55);
    auto samples = random_samples(3, 0.05, 2, 91);

    auto [v0, g0] = infidelity_gradient(problem, setup, s, samples);
    auto [v1, g1] = infidelity_gradient(problem, phased, s, samples);

    CHECK(std::abs(v0.meanInfidelity - v1.meanInfidelity) < 1e-12);
    for (long j = 0; j < 3; ++j)
        for (long l = 0; l < 2; ++l) {
            const auto ju = static_cast<size_t>(j);
            const auto lu = static_cast<size_t>(l);
            CHECK(std::abs(g0.gx[ju][lu] - g1.gx[ju][lu]) < 1e-12);
            CHECK(std::abs(g0.gy[ju][lu] - g1.gy[ju][lu]) < 1e-12);
        }
}

TEST_CASE("ensemble mean is the fixed-order mean of per-sample gradients") {
    ControlProblem problem;
    {
        ProblemOverrides ov;
        ov.bins = 2;
        ov.totalTime = 0.5;
        problem = build_problem(Task::GHZPrep, 4, 0.05, ov);
    }
    TaskSetup setup = make_setup(problem);
    PulseSchedule s = random_schedule(4, 2, problem.schedule.dt, 66);
    auto samples = random_samples(4, 0.05, 3, 92);

    auto [vAll, gAll] = infidelity_gradient(problem, setup, s, samples);

    std::vector<GradientField> parts;
    std::vector<double> chis;
    for (const auto& sample : samples) {
        auto [v, g] = infidelity_gradient(problem, setup, s, {sample});
        parts.push_back(g);
        chis.push_back(v.meanInfidelity);
    }
    double chiSum = 0.0;
    for (double c : chis) chiSum += c;
    CHECK(vAll.meanInfidelity == chiSum / 3.0);
    for (long j = 0; j < 4; ++j)
        for (long l = 0; l < 2; ++l) {
            const auto ju = static_cast<size_t>(j);
            const auto lu = static_cast<size_t>(l);
            double sum = 0.0;
            for (const auto& g : parts) sum += g.gx[ju][lu];
            CHECK(gAll.gx[ju][lu] == sum / 3.0);
            sum = 0.0;
            for (const auto& g : parts) sum += g.gy[ju][lu];
            CHECK(gAll.gy[ju][lu] == sum / 3.0);
        }
}

TEST_CASE("results are identical at any worker count") {
    ControlProblem problem;
    {
        ProblemOverrides ov;
        ov.bins = 2;
        ov.totalTime = 0.5;
        problem = build_problem(Task::ParallelCNOT, 4, 0.05, ov);
    }
    TaskSetup setup = make_setup(problem);
    PulseSchedule s = random_schedule(4, 2, problem.schedule.dt, 67);
    auto samples = random_samples(4, 0.05, 5, 93);

    auto [v1, g1] = infidelity_gradient(problem, setup, s, samples, 1);
    auto [v2, g2] = infidelity_gradient(problem, setup, s, samples, 2);
    auto [v5, g5] = infidelity_gradient(problem, setup, s, samples, 5);

    CHECK(v1.meanInfidelity == v2.meanInfidelity);
    CHECK(v1.meanInfidelity == v5.meanInfidelity);
    for (size_t i = 0; i < samples.size(); ++i) {
        CHECK(v1.perSample[i] == v2.perSample[i]);
        CHECK(v1.overlapPhases[i] == v5.overlapPhases[i]);
    }
    for (long j = 0; j < 4; ++j)
        for (long l = 0; l < 2; ++l) {
            const auto ju = static_cast<size_t>(j);
            const auto lu = static_cast<size_t>(l);
            CHECK(g1.gx[ju][lu] == g2.gx[ju][lu]);
            CHECK(g1.gx[ju][lu] == g5.gx[ju][lu]);
            CHECK(g1.gy[ju][lu] == g2.gy[ju][lu]);
            CHECK(g1.gy[ju][lu] == g5.gy[ju][lu]);
        }
}

TEST_CASE("duplicating the sample list changes nothing") {
    ControlProblem problem;
    {
        ProblemOverrides ov;
        ov.bins = 2;
        ov.totalTime = 0.4;
        problem = build_problem(Task::ParallelX, 3, 0.05, ov);
    }
    TaskSetup setup = make_setup(problem);
    PulseSchedule s = random_schedule(3, 2, problem.schedule.dt, 68);
    auto one = random_samples(3, 0.05, 1, 94);
    std::vector<ParasiticSample> two = {one[0], one[0]};

    auto [vOne, gOne] = infidelity_gradient(problem, setup, s, one);
    auto [vTwo, gTwo] = infidelity_gradient(problem, setup, s, two);

    CHECK(vOne.meanInfidelity == vTwo.meanInfidelity);
    CHECK(gOne.gx == gTwo.gx);
    CHECK(gOne.gy == gTwo.gy);
}

TEST_CASE("objective value is consistent with its own per-sample data") {
    ControlProblem problem;
    {
        ProblemOverrides ov;
        ov.bins = 2;
        ov.totalTime = 0.5;
        problem = build_problem(Task::GHZPrep, 4, 0.05, ov);
    }
    TaskSetup setup = make_setup(problem);
    PulseSchedule s = random_schedule(4, 2, problem.schedule.dt, 69);
    auto samples = random_samples(4, 0.05, 4, 95);

    ObjectiveValue value = evaluate_infidelity(problem, setup, s, samples);
    REQUIRE(value.perSample.size() == 4);
    REQUIRE(value.overlapPhases.size() == 4);
    double mag = 0.0;
    for (const cplx& o : value.overlapPhases) mag += std::norm(o);
    CHECK(std::abs(value.meanInfidelity - (1.0 - mag / 4.0)) < 1e-14);

    auto [vGrad, gGrad] = infidelity_gradient(problem, setup, s, samples);
    (void)gGrad;
    CHECK(vGrad.meanInfidelity == doctest::Approx(value.meanInfidelity).epsilon(1e-15));
}

TEST_CASE("a zero-bin schedule yields an empty gradient") {
    ControlProblem problem = build_problem(Task::GHZPrep, 4, 0.0);
    TaskSetup setup = make_setup(problem);
    PulseSchedule s = empty_schedule(4);

    auto [value, grad] = infidelity_gradient(problem, setup, s, random_samples(4, 0.0, 1, 1));
    CHECK(value.meanInfidelity == doctest::Approx(0.5).epsilon(1e-12));
    REQUIRE(grad.gx.size() == 4);
    for (const auto& row : grad.gx) CHECK(row.empty());
    for (const auto& row : grad.gy) CHECK(row.empty());

    CHECK(finite_difference_check(problem, setup, s, random_samples(4, 0.0, 1, 1)) == 0.0);
}

TEST_CASE("bad evaluation inputs are rejected") {
    ControlProblem problem = build_problem(Task::ParallelX, 3, 0.0);
    TaskSetup setup = make_setup(problem);

    CHECK_THROWS_AS((void)infidelity_gradient(problem, setup, problem.schedule, {}),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        (void)evaluate_infidelity(problem, setup, zero_schedule(4, 3, 0.1), random_samples(3, 0.0, 1, 1)),
        std::invalid_argument);

    // A sample for the wrong chain length surfaces with its index attached.
    auto bad = random_samples(2, 0.05, 1, 5);
    try {
        (void)infidelity_gradient(problem, setup, problem.schedule, {bad[0]});
        CHECK(false);
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("sample 0") == 0);
    }
}

} // TEST_SUITE
