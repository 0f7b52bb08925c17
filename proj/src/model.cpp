#include "qoc/model.hpp"

#include "qoc/rng.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qoc {

PulseSchedule zero_schedule(long n, long bins, double dt) {
    if (n < 1) throw std::invalid_argument("zero_schedule: need n >= 1");
    if (bins < 1) throw std::invalid_argument("zero_schedule: need bins >= 1");
    if (!(dt > 0.0)) throw std::invalid_argument("zero_schedule: need dt > 0");
    PulseSchedule s;
    s.n = n;
    s.bins = bins;
    s.dt = dt;
    s.x.assign(static_cast<size_t>(n), std::vector<double>(static_cast<size_t>(bins), 0.0));
    s.y = s.x;
    return s;
}

void validate_schedule(const PulseSchedule& s) {
    // bins == 0 is a legal degenerate schedule (no evolution, empty
    // gradient); the constructors below only build nonempty ones.
    if (s.n < 1 || s.bins < 0 || !(s.dt > 0.0) || !std::isfinite(s.dt))
        throw std::invalid_argument("schedule: invalid dimensions or bin width");
    for (const auto* rows : {&s.x, &s.y}) {
        if (static_cast<long>(rows->size()) != s.n)
            throw std::invalid_argument("schedule: amplitude row count does not match n");
        for (const auto& row : *rows) {
            if (static_cast<long>(row.size()) != s.bins)
                throw std::invalid_argument("schedule: amplitude row length does not match bins");
            for (double a : row)
                if (!std::isfinite(a)) throw std::invalid_argument("schedule: nonfinite amplitude");
        }
    }
}

PulseSchedule pi_pulse_schedule(long n, long bins) {
    PulseSchedule s = zero_schedule(n, bins, kTauPi / static_cast<double>(bins));
    for (auto& row : s.x) row.assign(row.size(), 1.0);
    return s;
}

CouplingPattern alternating_coupling(long n, double g) {
    if (n < 2) throw std::invalid_argument("alternating_coupling: need n >= 2");
    CouplingPattern p;
    p.g.assign(static_cast<size_t>(n - 1), 0.0);
    for (size_t b = 0; b < p.g.size(); b += 2) p.g[b] = g;
    return p;
}

CouplingPattern uniform_coupling(long n, double g) {
    if (n < 2) throw std::invalid_argument("uniform_coupling: need n >= 2");
    CouplingPattern p;
    p.g.assign(static_cast<size_t>(n - 1), g);
    return p;
}

ParasiticSample zero_sample(long n) {
    if (n < 2) throw std::invalid_argument("zero_sample: need n >= 2");
    ParasiticSample s;
    s.jx.assign(static_cast<size_t>(n - 1), 0.0);
    s.jy = s.jx;
    s.jz = s.jx;
    return s;
}

long default_sample_count(long n) { return 6 * (n - 1); }

EnsembleSpec verification_spec(const EnsembleSpec& spec) {
    EnsembleSpec v = spec;
    v.m = spec.m * 5;
    v.seed = spec.seed + kVerificationSeedOffset;
    return v;
}

std::vector<ParasiticSample> sample_ensemble(const EnsembleSpec& spec, long n) {
    if (spec.deltaJ < 0.0) throw std::invalid_argument("sample_ensemble: deltaJ must be >= 0");
    if (spec.m < 1) throw std::invalid_argument("sample_ensemble: need at least one sample");
    if (n < 2) throw std::invalid_argument("sample_ensemble: need n >= 2");

    const Philox rng(spec.seed);
    const size_t bonds = static_cast<size_t>(n - 1);
    std::vector<ParasiticSample> out(static_cast<size_t>(spec.m));
    for (long s = 0; s < spec.m; ++s) {
        ParasiticSample& ps = out[static_cast<size_t>(s)];
        ps.jx.resize(bonds);
        ps.jy.resize(bonds);
        ps.jz.resize(bonds);
        for (size_t b = 0; b < bonds; ++b) {
            const uint64_t base = 3 * static_cast<uint64_t>(b);
            ps.jx[b] = rng.uniform(static_cast<uint64_t>(s), base, -spec.deltaJ, spec.deltaJ);
            ps.jy[b] = rng.uniform(static_cast<uint64_t>(s), base + 1, -spec.deltaJ, spec.deltaJ);
            ps.jz[b] = rng.uniform(static_cast<uint64_t>(s), base + 2, -spec.deltaJ, spec.deltaJ);
        }
    }
    return out;
}

const char* task_name(Task task) {
    switch (task) {
        case Task::ParallelX: return "parallel_x";
        case Task::ParallelCNOT: return "parallel_cnot";
        case Task::GHZPrep: return "ghz_prep";
        case Task::HeisenbergGroundPrep: return "heisenberg_ground_prep";
    }
    throw std::invalid_argument("task_name: unknown task");
}

ControlProblem build_problem(Task task, long n, double deltaJ, const ProblemOverrides& overrides) {
    if (n < 2) throw std::invalid_argument("build_problem: need n >= 2");
    if (deltaJ < 0.0) throw std::invalid_argument("build_problem: deltaJ must be >= 0");
    if ((task == Task::ParallelCNOT || task == Task::HeisenbergGroundPrep) && n % 2 != 0)
        throw std::invalid_argument(std::string("build_problem: ") + task_name(task) +
                                    " requires even n, got " + std::to_string(n));

    ControlProblem p;
    p.task = task;
    p.n = n;

    double totalTime = 0.0;
    long bins = 0;
    switch (task) {
        case Task::ParallelX:
            totalTime = kTauPi;
            bins = 10;
            p.dMax = 20;
            p.coupling = uniform_coupling(n, 0.0);
            break;
        case Task::ParallelCNOT:
            totalTime = kTauG / 2.0;
            bins = 20;
            p.dMax = 20;
            p.coupling = alternating_coupling(n, 1.0);
            break;
        case Task::GHZPrep:
            totalTime = static_cast<double>(n) * kTauG / 8.0;
            bins = 20 * n;
            p.dMax = 10;
            p.coupling = uniform_coupling(n, 1.0);
            break;
        case Task::HeisenbergGroundPrep:
            totalTime = static_cast<double>(n) * kTauG / 2.0;
            bins = 20 * n;
            p.dMax = 20;
            p.coupling = uniform_coupling(n, 1.0);
            break;
    }

    if (overrides.totalTime) totalTime = *overrides.totalTime;
    if (overrides.bins) bins = *overrides.bins;
    if (overrides.dMax) p.dMax = *overrides.dMax;
    if (overrides.g) {
        const double g = *overrides.g;
        p.coupling = (task == Task::ParallelCNOT) ? alternating_coupling(n, g)
                                                  : uniform_coupling(n, g);
    }
    if (!(totalTime > 0.0) || bins < 1)
        throw std::invalid_argument("build_problem: duration and bin count must be positive");

    p.schedule = zero_schedule(n, bins, totalTime / static_cast<double>(bins));
    p.cutoff = overrides.cutoff.value_or(1e-12);
    p.ampCap = overrides.ampCap;
    if (p.dMax < 2) throw std::invalid_argument("build_problem: dMax must be at least 2");

    p.ensemble.deltaJ = deltaJ;
    p.ensemble.nJ = 3 * (n - 1);
    p.ensemble.m = overrides.m.value_or(deltaJ == 0.0 ? 1 : default_sample_count(n));
    p.ensemble.seed = overrides.seed.value_or(12345);
    return p;
}

MPO heisenberg_mpo(long n) {
    if (n < 2) throw std::invalid_argument("heisenberg_mpo: need n >= 2");
    const cplx i(0.0, 1.0);
    // block (a, b) holds a 2x2 operator; entry (out, in) lands at (in, out)
    auto put_x = [](Tensor& w, long a, long b) {
        w.at({a, 1, 0, b}) = 1.0;
        w.at({a, 0, 1, b}) = 1.0;
    };
    auto put_y = [&i](Tensor& w, long a, long b) {
        w.at({a, 1, 0, b}) = -i;
        w.at({a, 0, 1, b}) = i;
    };
    auto put_z = [](Tensor& w, long a, long b) {
        w.at({a, 0, 0, b}) = 1.0;
        w.at({a, 1, 1, b}) = -1.0;
    };
    auto put_id = [](Tensor& w, long a, long b) {
        w.at({a, 0, 0, b}) = 1.0;
        w.at({a, 1, 1, b}) = 1.0;
    };

    MPO h;
    Tensor first({1, 2, 2, 5});
    put_id(first, 0, 0);
    put_x(first, 0, 1);
    put_y(first, 0, 2);
    put_z(first, 0, 3);
    h.sites.push_back(first);
    for (long j = 1; j + 1 < n; ++j) {
        Tensor w({5, 2, 2, 5});
        put_id(w, 0, 0);
        put_x(w, 0, 1);
        put_y(w, 0, 2);
        put_z(w, 0, 3);
        put_x(w, 1, 4);
        put_y(w, 2, 4);
        put_z(w, 3, 4);
        put_id(w, 4, 4);
        h.sites.push_back(w);
    }
    Tensor last({5, 2, 2, 1});
    put_x(last, 1, 0);
    put_y(last, 2, 0);
    put_z(last, 3, 0);
    put_id(last, 4, 0);
    h.sites.push_back(last);
    return h;
}

} // namespace qoc
