#include "qoc/cli.hpp"

#include "qoc/dense.hpp"
#include "qoc/objective.hpp"
#include "qoc/storage.hpp"
#include "qoc/tebd.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace qoc {

namespace {

namespace fs = std::filesystem;

std::string cell_stem(Task task, long n, double deltaJ) {
    return std::string(task_name(task)) + "_n" + std::to_string(n) + "_dj" + format_double(deltaJ);
}

std::string out_path(const std::string& outDir, const std::string& name) {
    return (fs::path(outDir) / name).string();
}

int gate_span(Task task) {
    switch (task) {
        case Task::ParallelX: return 1;
        case Task::ParallelCNOT: return 2;
        case Task::GHZPrep:
        case Task::HeisenbergGroundPrep: return 0;
    }
    return 0;
}

double std_error(const std::vector<double>& xs, double mean) {
    const long m = static_cast<long>(xs.size());
    if (m < 2) return 0.0;
    double acc = 0.0;
    for (double x : xs) acc += (x - mean) * (x - mean);
    return std::sqrt(acc / (static_cast<double>(m - 1) * static_cast<double>(m)));
}

struct VerificationReport {
    EnsembleSpec spec;
    double mean = 0.0;
    double stdError = 0.0;
    double halfFirst = 0.0;
    double halfSecond = 0.0;
};

VerificationReport verify_schedule(const ControlProblem& problem, const TaskSetup& setup,
                                   const PulseSchedule& schedule, long factor, long workers) {
    EnsembleSpec vspec = verification_spec(problem.ensemble);
    if (factor != 5) vspec.m = problem.ensemble.m * factor;
    const std::vector<ParasiticSample> samples = sample_ensemble(vspec, problem.n);
    const ObjectiveValue value = evaluate_infidelity(problem, setup, schedule, samples, workers);

    VerificationReport r;
    r.spec = vspec;
    r.mean = value.meanInfidelity;
    r.stdError = std_error(value.perSample, value.meanInfidelity);
    const size_t m = value.perSample.size();
    const size_t half = m / 2;
    if (half == 0) {
        r.halfFirst = r.halfSecond = r.mean;
    } else {
        double a = 0.0, b = 0.0;
        for (size_t i = 0; i < half; ++i) a += value.perSample[i];
        for (size_t i = half; i < m; ++i) b += value.perSample[i];
        r.halfFirst = a / static_cast<double>(half);
        r.halfSecond = b / static_cast<double>(m - half);
    }
    return r;
}

std::string history_csv(const std::vector<IterationRecord>& history) {
    std::ostringstream out;
    out << "iter,value,grad_norm,step\n";
    for (const IterationRecord& r : history)
        out << r.iter << "," << format_double(r.value) << "," << format_double(r.gradNorm) << ","
            << format_double(r.step) << "\n";
    return out.str();
}

std::string summary_text(const RunConfig& cfg, const std::string& fingerprint, long n, double rung,
                         const LadderCell& cell, const std::string& scheduleFileName,
                         const ControlProblem& problem, const VerificationReport& v) {
    std::ostringstream out;
    out << "# run summary\n";
    out << "task = " << task_name(cfg.task) << "\n";
    out << "n = " << n << "\n";
    out << "delta_j = " << format_double(rung) << "\n";
    out << "config_fingerprint = " << fingerprint << "\n";
    out << "schedule_file = " << scheduleFileName << "\n";
    out << "schedule_hash = " << schedule_content_hash(cell.schedule) << "\n";
    out << "improved = " << (cell.improved ? 1 : 0) << "\n";
    out << "iterations = " << cell.iterations << "\n";
    out << "seed_infidelity = " << format_double(cell.seedObjective) << "\n";
    out << "optimization_seed = " << problem.ensemble.seed << "\n";
    out << "optimization_m = " << problem.ensemble.m << "\n";
    out << "optimization_infidelity = " << format_double(cell.objective) << "\n";
    out << "verification_seed = " << v.spec.seed << "\n";
    out << "verification_m = " << v.spec.m << "\n";
    out << "verification_infidelity = " << format_double(v.mean) << "\n";
    out << "verification_std_error = " << format_double(v.stdError) << "\n";
    out << "half_ensemble_first = " << format_double(v.halfFirst) << "\n";
    out << "half_ensemble_second = " << format_double(v.halfSecond) << "\n";
    out << "half_ensemble_gap = " << format_double(std::abs(v.halfFirst - v.halfSecond)) << "\n";
    if (const int span = gate_span(cfg.task); span > 0) {
        out << "gate_span = " << span << "\n";
        out << "per_gate_infidelity = " << format_double(per_gate_infidelity(v.mean, n, span))
            << "\n";
    }
    return out.str();
}

struct LadderRun {
    std::vector<double> rungs;
    std::string fingerprint;
    LadderResults results;
};

// The shared front half of optimize and sweep: validate every cell up
// front, then walk the ladder, checkpointing and writing schedule files as
// cells finish.
LadderRun run_ladder(const RunConfig& cfg, bool resume, bool writeHistories) {
    LadderRun run;
    run.rungs = config_error_rungs(cfg);
    run.fingerprint = config_fingerprint(cfg);
    const ProblemOverrides ov = config_overrides(cfg);
    for (long n : cfg.sizes) (void)build_problem(cfg.task, n, run.rungs.back(), ov);
    fs::create_directories(cfg.outDir);

    LadderCheckpoint prior;
    const LadderResults* resumeCells = nullptr;
    if (resume && !cfg.checkpoint.empty() && fs::exists(cfg.checkpoint)) {
        prior = load_checkpoint(cfg.checkpoint);
        if (prior.configFingerprint != run.fingerprint)
            throw std::invalid_argument("checkpoint '" + cfg.checkpoint +
                                        "' belongs to a different configuration");
        resumeCells = &prior.cells;
        std::fprintf(stderr, "resuming %zu finished cells from %s\n", prior.cells.size(),
                     cfg.checkpoint.c_str());
    }

    LadderCheckpoint running;
    running.configFingerprint = run.fingerprint;
    auto onCell = [&](long n, double rung, const LadderCell& cell) {
        running.cells.emplace(std::make_pair(n, rung), cell);
        if (!cfg.checkpoint.empty())
            write_file_atomic(cfg.checkpoint, serialize_checkpoint(running));
        const std::string stem = cell_stem(cfg.task, n, rung);
        ScheduleFile file{cfg.task, rung, cfg.seed, run.fingerprint, cell.schedule};
        write_file_atomic(out_path(cfg.outDir, "schedule_" + stem + ".txt"),
                          serialize_schedule_file(file));
        if (writeHistories)
            write_file_atomic(out_path(cfg.outDir, "history_" + stem + ".csv"),
                              history_csv(cell.history));
        std::fprintf(stderr, "cell n=%ld delta_j=%s: infidelity %s after %ld iterations%s\n", n,
                     format_double(rung).c_str(), format_double(cell.objective).c_str(),
                     cell.iterations, cell.improved ? "" : " (kept seed)");
    };

    const ProblemOverrides factoryOv = ov;
    const Task task = cfg.task;
    TaskFactory factory = [task, factoryOv](long n, double rung) {
        return build_problem(task, n, rung, factoryOv);
    };
    LadderPlan plan;
    plan.sizes = cfg.sizes;
    plan.errors = run.rungs;
    run.results = ladder_optimize(plan, factory, config_optimizer(cfg), cfg.seed, onCell,
                                  cfg.workers, resumeCells);
    return run;
}

PulseSchedule degenerate_schedule(long n, double dt) {
    PulseSchedule s;
    s.n = n;
    s.bins = 0;
    s.dt = dt;
    s.x.assign(static_cast<size_t>(n), {});
    s.y.assign(static_cast<size_t>(n), {});
    return s;
}

} // namespace

int cmd_optimize(const RunConfig& cfg, bool resume) {
    LadderRun run = run_ladder(cfg, resume, true);
    const ProblemOverrides ov = config_overrides(cfg);
    std::map<long, TaskSetup> setups;
    for (const auto& [key, cell] : run.results) {
        const long n = key.first;
        const double rung = key.second;
        const ControlProblem problem = build_problem(cfg.task, n, rung, ov);
        auto found = setups.find(n);
        if (found == setups.end()) found = setups.emplace(n, make_setup(problem)).first;
        const VerificationReport v =
            verify_schedule(problem, found->second, cell.schedule, cfg.verificationFactor,
                            cfg.workers);
        const std::string stem = cell_stem(cfg.task, n, rung);
        write_file_atomic(out_path(cfg.outDir, "summary_" + stem + ".txt"),
                          summary_text(cfg, run.fingerprint, n, rung, cell,
                                       "schedule_" + stem + ".txt", problem, v));
        std::fprintf(stderr, "summary n=%ld delta_j=%s: verification infidelity %s over %ld samples\n",
                     n, format_double(rung).c_str(), format_double(v.mean).c_str(), v.spec.m);
    }
    return 0;
}

int cmd_evaluate(const RunConfig& cfg, const std::string& schedulePath) {
    const ScheduleFile file = load_schedule_file(schedulePath);
    const std::string fingerprint = config_fingerprint(cfg);
    if (file.configFingerprint != fingerprint)
        throw std::invalid_argument("schedule fingerprint " + file.configFingerprint +
                                    " does not match the configuration fingerprint " + fingerprint);
    if (file.task != cfg.task)
        throw std::invalid_argument("schedule was optimized for a different task");
    if (cfg.deltaJ.size() != 1)
        throw std::invalid_argument("evaluate needs a single delta_j value");
    const double delta = cfg.deltaJ[0];
    const long n = file.schedule.n;

    const ControlProblem problem = build_problem(cfg.task, n, delta, config_overrides(cfg));
    if (problem.schedule.bins != file.schedule.bins ||
        std::abs(problem.schedule.dt - file.schedule.dt) > 1e-12 * problem.schedule.dt)
        throw std::invalid_argument("schedule geometry does not match the configuration");

    const TaskSetup setup = make_setup(problem);
    const VerificationReport v =
        verify_schedule(problem, setup, file.schedule, cfg.verificationFactor, cfg.workers);

    std::ostringstream out;
    out << "# evaluation record\n";
    out << "task = " << task_name(cfg.task) << "\n";
    out << "n = " << n << "\n";
    out << "schedule_hash = " << schedule_content_hash(file.schedule) << "\n";
    out << "config_fingerprint = " << fingerprint << "\n";
    out << "training_delta_j = " << format_double(file.deltaJ) << "\n";
    out << "evaluated_delta_j = " << format_double(delta) << "\n";
    out << "verification_seed = " << v.spec.seed << "\n";
    out << "verification_m = " << v.spec.m << "\n";
    out << "mean_infidelity = " << format_double(v.mean) << "\n";
    out << "std_error = " << format_double(v.stdError) << "\n";
    out << "half_ensemble_first = " << format_double(v.halfFirst) << "\n";
    out << "half_ensemble_second = " << format_double(v.halfSecond) << "\n";
    out << "half_ensemble_gap = " << format_double(std::abs(v.halfFirst - v.halfSecond)) << "\n";
    if (const int span = gate_span(cfg.task); span > 0) {
        out << "gate_span = " << span << "\n";
        out << "per_gate_infidelity = " << format_double(per_gate_infidelity(v.mean, n, span))
            << "\n";
    }

    const std::string text = out.str();
    std::fputs(text.c_str(), stdout);
    fs::create_directories(cfg.outDir);
    const std::string stem = fs::path(schedulePath).stem().string();
    write_file_atomic(out_path(cfg.outDir, "evaluation_" + stem + ".txt"), text);
    return 0;
}

int cmd_sweep(const RunConfig& cfg, bool resume) {
    LadderRun run = run_ladder(cfg, resume, false);
    const ProblemOverrides ov = config_overrides(cfg);
    const double target = run.rungs.back();

    std::ostringstream csv;
    csv << "task,n,delta_j,robust,mean_infidelity,std_error,m,seed\n";
    std::map<long, TaskSetup> setups;
    for (long n : cfg.sizes) {
        const ControlProblem problem = build_problem(cfg.task, n, target, ov);
        auto found = setups.find(n);
        if (found == setups.end()) found = setups.emplace(n, make_setup(problem)).first;
        EnsembleSpec vspec = verification_spec(problem.ensemble);
        if (cfg.verificationFactor != 5) vspec.m = problem.ensemble.m * cfg.verificationFactor;
        const std::vector<ParasiticSample> samples = sample_ensemble(vspec, n);

        auto emit = [&](bool robust, const PulseSchedule& schedule) {
            const ObjectiveValue value =
                evaluate_infidelity(problem, found->second, schedule, samples, cfg.workers);
            csv << task_name(cfg.task) << "," << n << "," << format_double(target) << ","
                << (robust ? 1 : 0) << "," << format_double(value.meanInfidelity) << ","
                << format_double(std_error(value.perSample, value.meanInfidelity)) << ","
                << vspec.m << "," << vspec.seed << "\n";
        };
        emit(false, run.results.at({n, run.rungs.front()}).schedule);
        if (run.rungs.size() > 1) emit(true, run.results.at({n, target}).schedule);
    }

    const std::string path =
        out_path(cfg.outDir, "sweep_" + std::string(task_name(cfg.task)) + ".csv");
    write_file_atomic(path, csv.str());
    std::fprintf(stderr, "wrote %s\n", path.c_str());
    return 0;
}

int cmd_heatmap(const std::string& schedulePath, const std::string& outDir) {
    const ScheduleFile file = load_schedule_file(schedulePath);
    const fs::path src(schedulePath);
    const fs::path dir = outDir.empty()
                             ? (src.has_parent_path() ? src.parent_path() : fs::path("."))
                             : fs::path(outDir);
    fs::create_directories(dir);

    const bool xGate = file.task == Task::ParallelX;
    const double scale = xGate ? kTauPi : kTauG;
    auto matrix = [&](const char* quadrature, const std::vector<std::vector<double>>& rows) {
        std::ostringstream out;
        out << "# control amplitude heatmap, " << quadrature << " quadrature\n";
        out << "# rows = qubits, columns = time bins\n";
        out << "# task = " << task_name(file.task) << "\n";
        out << "# n = " << file.schedule.n << "\n";
        out << "# bins = " << file.schedule.bins << "\n";
        out << "# dt = " << format_double(file.schedule.dt) << "\n";
        out << "# total_time = " << format_double(file.schedule.total_time()) << "\n";
        out << "# timescale = " << (xGate ? "tau_pi" : "tau_g") << "\n";
        out << "# total_time_over_timescale = "
            << format_double(file.schedule.total_time() / scale) << "\n";
        out << "# units = drive amplitude in units of the unit energy scale\n";
        for (const auto& row : rows) {
            for (size_t l = 0; l < row.size(); ++l)
                out << (l ? "," : "") << format_double(row[l]);
            out << "\n";
        }
        return out.str();
    };

    const std::string stem = src.stem().string();
    write_file_atomic((dir / (stem + "_x.csv")).string(), matrix("x", file.schedule.x));
    write_file_atomic((dir / (stem + "_y.csv")).string(), matrix("y", file.schedule.y));
    std::fprintf(stderr, "wrote %s and %s under %s\n", (stem + "_x.csv").c_str(),
                 (stem + "_y.csv").c_str(), dir.string().c_str());
    return 0;
}

int cmd_gradcheck(const RunConfig& cfg) {
    for (long n : cfg.sizes)
        if (n > 5)
            throw std::invalid_argument("gradcheck supports n <= 5, got " + std::to_string(n));
    const std::vector<double> rungs = config_error_rungs(cfg);
    const double delta = rungs.back();

    for (long n : cfg.sizes) {
        ProblemOverrides ov = config_overrides(cfg);
        // Truncation-free bond cap: one staircase layer per bin never needs
        // more than 4^(n/2) on any cut, for kets and operators alike.
        ov.dMax = std::max<long>(2, 1L << (2 * (n / 2)));
        ov.cutoff = 0.0;
        const bool zeroBins = cfg.bins && *cfg.bins == 0;
        if (zeroBins) ov.bins = 1;

        const ControlProblem problem = build_problem(cfg.task, n, delta, ov);
        const PulseSchedule schedule = zeroBins
                                           ? degenerate_schedule(n, problem.schedule.dt)
                                           : make_initial_guess(problem, cfg.seed);
        const std::vector<ParasiticSample> samples = sample_ensemble(problem.ensemble, n);
        const TaskSetup setup = make_setup(problem);

        double deficit = 0.0;
        if (setup.gateTask) {
            const MPO evolved = propagate(setup.initialOperator, schedule, problem.coupling,
                                          samples[0], problem.dMax, 0.0).final;
            deficit = 1.0 - std::abs(dense_trace_overlap(
                                dense_propagate(dense_operator(setup.initialOperator), schedule,
                                                problem.coupling, samples[0]),
                                dense_operator(evolved)));
        } else {
            const MPS evolved = propagate(setup.initialState, schedule, problem.coupling,
                                          samples[0], problem.dMax, 0.0).final;
            deficit = 1.0 - std::abs(dense_overlap(
                                dense_propagate(dense_state(setup.initialState), schedule,
                                                problem.coupling, samples[0]),
                                dense_state(evolved)));
        }

        std::printf("gradcheck: task=%s n=%ld bins=%ld parameters=%ld\n", task_name(cfg.task), n,
                    schedule.bins, 2 * n * schedule.bins);
        if (schedule.bins == 0) {
            std::printf("max_relative_gradient_error = vacuous pass (no control parameters)\n");
        } else {
            const double rel = finite_difference_check(problem, setup, schedule, samples);
            std::printf("max_relative_gradient_error = %s\n", format_double(rel).c_str());
        }
        std::printf("dense_oracle_overlap_deficit = %s\n", format_double(deficit).c_str());
    }
    return 0;
}

} // namespace qoc
