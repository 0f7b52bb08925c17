#pragma once

#include "qoc/mpo.hpp"
#include "qoc/mps.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace qoc {

// Energy scale of the drive is 1 throughout: the reference pi pulse has unit
// Rabi amplitude and duration tauPi = pi/2, and a unit tunable coupling has
// interaction timescale tauG = 2*pi.
inline constexpr double kTauPi = 1.5707963267948966;
inline constexpr double kTauG = 6.283185307179586;

// Piecewise-constant control amplitudes x[j][l], y[j][l] for qubit j, bin l.
struct PulseSchedule {
    long n = 0;
    long bins = 0;
    double dt = 0.0;
    std::vector<std::vector<double>> x;
    std::vector<std::vector<double>> y;

    double total_time() const { return static_cast<double>(bins) * dt; }

    friend bool operator==(const PulseSchedule&, const PulseSchedule&) = default;
};

PulseSchedule zero_schedule(long n, long bins, double dt);

// Rejects ragged amplitude arrays, nonfinite entries, and dt <= 0.
void validate_schedule(const PulseSchedule& s);

// Uniform x drive integrating to a pi rotation on every qubit: amplitude 1
// over total time pi/2, any bin count.
PulseSchedule pi_pulse_schedule(long n, long bins);

// Tunable coupling strength per bond, constant in time.
struct CouplingPattern {
    std::vector<double> g;
};

// g on bonds 0, 2, 4, ... (inside qubit pairs), zero in between.
CouplingPattern alternating_coupling(long n, double g);
CouplingPattern uniform_coupling(long n, double g);

// One realization of the parasitic couplings, n-1 entries per axis.
struct ParasiticSample {
    std::vector<double> jx, jy, jz;
};

ParasiticSample zero_sample(long n);

struct EnsembleSpec {
    double deltaJ = 0.0;
    long m = 1;        // sample count
    long nJ = 0;       // parasitic term count 3(n-1), fixed by build_problem
    uint64_t seed = 0;
};

// Optimization default M = 2 * 3(n-1).
long default_sample_count(long n);

// The verification ensemble is 5x larger and draws from a shifted seed so it
// never overlaps the optimization ensemble.
inline constexpr uint64_t kVerificationSeedOffset = 0x9E3779B97F4A7C15ull;
EnsembleSpec verification_spec(const EnsembleSpec& spec);

// Deterministic i.i.d. draws, uniform on [-deltaJ, deltaJ]: sample s, bond b
// uses substream draws (3b, 3b+1, 3b+2) for (jx, jy, jz).
std::vector<ParasiticSample> sample_ensemble(const EnsembleSpec& spec, long n);

enum class Task { ParallelX, ParallelCNOT, GHZPrep, HeisenbergGroundPrep };

const char* task_name(Task task);

struct ControlProblem {
    Task task = Task::ParallelX;
    long n = 0;
    CouplingPattern coupling;
    PulseSchedule schedule;   // zero amplitudes; fixes (bins, dt)
    EnsembleSpec ensemble;
    long dMax = 0;
    double cutoff = 0.0;
    std::optional<double> ampCap;
};

struct ProblemOverrides {
    std::optional<double> totalTime;
    std::optional<long> bins;
    std::optional<long> dMax;
    std::optional<double> cutoff;
    std::optional<long> m;
    std::optional<uint64_t> seed;
    std::optional<double> g;
    std::optional<double> ampCap;
};

// Task defaults: gates run at fixed duration (tauPi for the X gate, tauG/2
// for the CNOT) with 10 or 20 bins and dMax 20; state preparation runs at
// n*tauG/8 (GHZ, dMax 10) or n*tauG/2 (Heisenberg, dMax 20) with 20n bins.
// CNOT and Heisenberg tasks require even n.
ControlProblem build_problem(Task task, long n, double deltaJ,
                             const ProblemOverrides& overrides = {});

// Sum over bonds of XX + YY + ZZ in the standard bond-5 form.
MPO heisenberg_mpo(long n);

struct DmrgResult {
    MPS state;
    double energy = 0.0;
    std::vector<double> sweepEnergies;
};

// Two-site sweeps with a warm-started Lanczos solve on each pair.  Stops
// when the energy improves by less than tol over a full sweep, or after
// `sweeps` sweeps.  Requires an even-length chain.
DmrgResult dmrg_ground_state(const MPO& h, long dMax, long sweeps, double tol);

} // namespace qoc
