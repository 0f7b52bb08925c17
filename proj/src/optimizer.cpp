#include "qoc/optimizer.hpp"

#include "qoc/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace qoc {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void axpy(double a, const std::vector<double>& x, std::vector<double>& y) {
    for (size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

double inf_norm(const std::vector<double>& a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

void check_finite(double f, const std::vector<double>& g, long iter) {
    if (!std::isfinite(f))
        throw std::runtime_error("lbfgs: nonfinite objective value at iteration " +
                                 std::to_string(iter));
    for (double v : g)
        if (!std::isfinite(v))
            throw std::runtime_error("lbfgs: nonfinite gradient at iteration " +
                                     std::to_string(iter));
}

void check_config(const OptimizerConfig& c) {
    if (c.maxIters < 1) throw std::invalid_argument("lbfgs: need maxIters >= 1");
    if (c.memory < 1) throw std::invalid_argument("lbfgs: need memory >= 1");
    if (!(c.gradTol >= 0.0)) throw std::invalid_argument("lbfgs: need gradTol >= 0");
    const auto& w = c.lineSearch;
    if (!(0.0 < w.c1 && w.c1 < w.c2 && w.c2 < 1.0))
        throw std::invalid_argument("lbfgs: need 0 < c1 < c2 < 1");
    if (w.maxTrials < 2) throw std::invalid_argument("lbfgs: need maxTrials >= 2");
}

struct CurvaturePair {
    std::vector<double> s, y;
    double rho = 0.0;
};

std::vector<double> flatten_field(const GradientField& f) {
    std::vector<double> v;
    size_t total = 0;
    for (const auto& row : f.gx) total += row.size();
    v.reserve(2 * total);
    for (const auto& row : f.gx) v.insert(v.end(), row.begin(), row.end());
    for (const auto& row : f.gy) v.insert(v.end(), row.begin(), row.end());
    return v;
}

} // namespace

MinimizeResult lbfgs_minimize(const ObjectiveFn& eval, std::vector<double> init,
                              const OptimizerConfig& config) {
    check_config(config);
    MinimizeResult out;

    if (init.empty()) {
        std::vector<double> g;
        const double f = eval(init, g);
        check_finite(f, g, 0);
        out.best = std::move(init);
        out.bestValue = f;
        out.history.push_back({0, f, 0.0, 0.0});
        out.reason = StopReason::EmptyParameters;
        return out;
    }

    const size_t dim = init.size();
    std::vector<double> x = std::move(init);
    if (config.project) config.project(x);
    std::vector<double> g(dim);
    double f = eval(x, g);
    check_finite(f, g, 0);
    if (g.size() != dim) throw std::invalid_argument("lbfgs: gradient length mismatch");

    out.history.push_back({0, f, inf_norm(g), 0.0});
    out.best = x;
    out.bestValue = f;
    out.reason = StopReason::MaxIters;

    const double c1 = config.lineSearch.c1;
    const double c2 = config.lineSearch.c2;
    std::deque<CurvaturePair> pairs;
    std::vector<double> d(dim), xTrial(dim), gTrial(dim), alpha;

    for (long iter = 1; iter <= config.maxIters; ++iter) {
        if (inf_norm(g) <= config.gradTol) {
            out.reason = StopReason::GradTol;
            break;
        }

        // Two-loop recursion for d = -H g.
        d = g;
        alpha.assign(pairs.size(), 0.0);
        for (long i = static_cast<long>(pairs.size()) - 1; i >= 0; --i) {
            const auto& p = pairs[static_cast<size_t>(i)];
            alpha[static_cast<size_t>(i)] = p.rho * dot(p.s, d);
            axpy(-alpha[static_cast<size_t>(i)], p.y, d);
        }
        if (!pairs.empty()) {
            const auto& last = pairs.back();
            const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
            for (double& v : d) v *= gamma;
        }
        for (size_t i = 0; i < pairs.size(); ++i) {
            const auto& p = pairs[i];
            const double beta = p.rho * dot(p.y, d);
            axpy(alpha[i] - beta, p.s, d);
        }
        for (double& v : d) v = -v;

        double dphi0 = dot(d, g);
        if (!(dphi0 < 0.0)) {
            pairs.clear();
            for (size_t i = 0; i < dim; ++i) d[i] = -g[i];
            dphi0 = dot(d, g);
            if (!(dphi0 < 0.0)) {
                out.reason = StopReason::GradTol;
                break;
            }
        }

        long trials = 0;
        double lastF = 0.0;
        auto phi = [&](double a, double& fOut, double& dOut) {
            for (size_t i = 0; i < dim; ++i) xTrial[i] = x[i] + a * d[i];
            fOut = eval(xTrial, gTrial);
            check_finite(fOut, gTrial, iter);
            dOut = dot(gTrial, d);
            lastF = fOut;
            ++trials;
        };

        // Zoom keeps [alo, ahi] with alo the best sufficient-decrease point.
        auto zoom = [&](double alo, double flo, double dlo, double ahi, double fhi,
                        double dhi) -> std::optional<double> {
            (void)fhi;
            (void)dhi;
            while (trials < config.lineSearch.maxTrials) {
                if (std::abs(ahi - alo) <= 1e-16 * std::max(1.0, std::abs(alo)))
                    return std::nullopt;
                const double aj = 0.5 * (alo + ahi);
                double fj = 0.0, dj = 0.0;
                phi(aj, fj, dj);
                if (fj > f + c1 * aj * dphi0 || fj >= flo) {
                    ahi = aj;
                } else {
                    if (std::abs(dj) <= -c2 * dphi0) return aj;
                    if (dj * (ahi - alo) >= 0.0) ahi = alo;
                    alo = aj;
                    flo = fj;
                    dlo = dj;
                }
            }
            return std::nullopt;
        };

        double aInit = 1.0;
        if (pairs.empty()) {
            const double dn = std::sqrt(dot(d, d));
            if (dn > 1.0) aInit = 1.0 / dn;
        }

        std::optional<double> accepted;
        double aPrev = 0.0, fPrev = f, dPrev = dphi0;
        double a = aInit;
        while (trials < config.lineSearch.maxTrials) {
            double fa = 0.0, da = 0.0;
            phi(a, fa, da);
            if (fa > f + c1 * a * dphi0 || (aPrev > 0.0 && fa >= fPrev)) {
                accepted = zoom(aPrev, fPrev, dPrev, a, fa, da);
                break;
            }
            if (std::abs(da) <= -c2 * dphi0) {
                accepted = a;
                break;
            }
            if (da >= 0.0) {
                accepted = zoom(a, fa, da, aPrev, fPrev, dPrev);
                break;
            }
            aPrev = a;
            fPrev = fa;
            dPrev = da;
            a *= 2.0;
            if (a > 1e12) break;
        }

        if (!accepted) {
            out.reason = StopReason::LineSearchFailure;
            break;
        }

        // xTrial and gTrial hold the accepted point: every line-search path
        // returns straight after its successful evaluation.
        const double step = *accepted;
        std::vector<double> s(dim), yv(dim);
        for (size_t i = 0; i < dim; ++i) {
            s[i] = xTrial[i] - x[i];
            yv[i] = gTrial[i] - g[i];
        }

        bool movedByProjection = false;
        if (config.project) {
            std::vector<double> projected = xTrial;
            config.project(projected);
            for (size_t i = 0; i < dim; ++i)
                if (projected[i] != xTrial[i]) {
                    movedByProjection = true;
                    break;
                }
            if (movedByProjection) {
                xTrial = std::move(projected);
                lastF = eval(xTrial, gTrial);
                check_finite(lastF, gTrial, iter);
            }
        }

        if (!movedByProjection) {
            const double sy = dot(s, yv);
            if (sy > 1e-10 * std::sqrt(dot(s, s)) * std::sqrt(dot(yv, yv))) {
                pairs.push_back({std::move(s), std::move(yv), 1.0 / sy});
                if (static_cast<long>(pairs.size()) > config.memory) pairs.pop_front();
            }
        }

        x = xTrial;
        g = gTrial;
        f = lastF;
        out.history.push_back({iter, f, inf_norm(g), step});
        if (f < out.bestValue) {
            out.bestValue = f;
            out.best = x;
        }
    }
    return out;
}

std::vector<double> flatten_schedule(const PulseSchedule& s) {
    validate_schedule(s);
    std::vector<double> v;
    v.reserve(static_cast<size_t>(2 * s.n * s.bins));
    for (const auto& row : s.x) v.insert(v.end(), row.begin(), row.end());
    for (const auto& row : s.y) v.insert(v.end(), row.begin(), row.end());
    return v;
}

PulseSchedule unflatten_schedule(const std::vector<double>& v, long n, long bins, double dt) {
    if (n < 1 || bins < 0 || !(dt > 0.0))
        throw std::invalid_argument("unflatten_schedule: invalid dimensions");
    if (static_cast<long>(v.size()) != 2 * n * bins)
        throw std::invalid_argument("unflatten_schedule: parameter count does not match n x bins");
    PulseSchedule s;
    s.n = n;
    s.bins = bins;
    s.dt = dt;
    s.x.assign(static_cast<size_t>(n), std::vector<double>(static_cast<size_t>(bins)));
    s.y = s.x;
    size_t k = 0;
    for (auto& row : s.x)
        for (double& a : row) a = v[k++];
    for (auto& row : s.y)
        for (double& a : row) a = v[k++];
    return s;
}

PulseSchedule extend_schedule(const PulseSchedule& s, long newN) {
    validate_schedule(s);
    if (newN < s.n)
        throw std::invalid_argument("extend_schedule: cannot shrink " + std::to_string(s.n) +
                                    " rows to " + std::to_string(newN));
    PulseSchedule out = s;
    out.n = newN;
    while (static_cast<long>(out.x.size()) < newN) {
        out.x.push_back(out.x.back());
        out.y.push_back(out.y.back());
    }
    return out;
}

PulseSchedule pad_bins(const PulseSchedule& s, long newBins) {
    validate_schedule(s);
    if (newBins < s.bins)
        throw std::invalid_argument("pad_bins: cannot shrink " + std::to_string(s.bins) +
                                    " bins to " + std::to_string(newBins));
    PulseSchedule out = s;
    out.bins = newBins;
    for (auto* rows : {&out.x, &out.y})
        for (auto& row : *rows) row.resize(static_cast<size_t>(newBins), 0.0);
    return out;
}

std::vector<double> error_ladder(double maxDelta) {
    if (!(maxDelta >= 0.0)) throw std::invalid_argument("error_ladder: need maxDelta >= 0");
    std::vector<double> rungs{0.0};
    for (long k = 1; 0.01 * static_cast<double>(k) < maxDelta - 1e-12; ++k)
        rungs.push_back(0.01 * static_cast<double>(k));
    if (maxDelta > 1e-12) rungs.push_back(maxDelta);
    return rungs;
}

PulseSchedule make_initial_guess(const ControlProblem& problem, uint64_t seed) {
    const long n = problem.n;
    const long bins = problem.schedule.bins;
    const double dt = problem.schedule.dt;
    Philox rng(seed);
    auto noise = [&](long draw) { return rng.uniform(0, static_cast<uint64_t>(draw), -1.0, 1.0); };

    switch (problem.task) {
    case Task::ParallelX: {
        // Constant pulse integrating to a pi rotation, plus 1% noise.
        const double base = kTauPi / problem.schedule.total_time();
        PulseSchedule s = zero_schedule(n, bins, dt);
        long draw = 0;
        for (long j = 0; j < n; ++j)
            for (long l = 0; l < bins; ++l) {
                s.x[static_cast<size_t>(j)][static_cast<size_t>(l)] =
                    base * (1.0 + 0.01 * noise(draw++));
                s.y[static_cast<size_t>(j)][static_cast<size_t>(l)] = 0.01 * base * noise(draw++);
            }
        return s;
    }
    case Task::ParallelCNOT: {
        // Solve the single-pair problem once, deterministically, and tile the
        // two resulting rows across all pairs.  A handful of restarts guards
        // against shallow local minima near zero amplitude.
        ProblemOverrides ov;
        ov.bins = bins;
        ov.totalTime = problem.schedule.total_time();
        ov.dMax = problem.dMax;
        ov.cutoff = problem.cutoff;
        ControlProblem pairProblem = build_problem(Task::ParallelCNOT, 2, 0.0, ov);
        TaskSetup pairSetup = make_setup(pairProblem);

        OptimizerConfig mini;
        mini.maxIters = 300;
        mini.gradTol = 1e-12;

        std::optional<OptimizeOutcome> best;
        for (uint64_t attempt = 0; attempt < 3; ++attempt) {
            Philox miniRng(seed + 0x100 * (attempt + 1));
            PulseSchedule start = zero_schedule(2, bins, dt);
            long draw = 0;
            for (long j = 0; j < 2; ++j)
                for (long l = 0; l < bins; ++l) {
                    start.x[static_cast<size_t>(j)][static_cast<size_t>(l)] =
                        0.2 * miniRng.uniform(0, static_cast<uint64_t>(draw++), -1.0, 1.0);
                    start.y[static_cast<size_t>(j)][static_cast<size_t>(l)] =
                        0.2 * miniRng.uniform(0, static_cast<uint64_t>(draw++), -1.0, 1.0);
                }
            OptimizeOutcome outcome = optimize_problem(pairProblem, pairSetup, start, mini, 1);
            if (!best || outcome.objective.meanInfidelity < best->objective.meanInfidelity)
                best = std::move(outcome);
        }

        PulseSchedule s = zero_schedule(n, bins, dt);
        for (long j = 0; j < n; ++j) {
            s.x[static_cast<size_t>(j)] = best->schedule.x[static_cast<size_t>(j % 2)];
            s.y[static_cast<size_t>(j)] = best->schedule.y[static_cast<size_t>(j % 2)];
        }
        return s;
    }
    case Task::GHZPrep:
    case Task::HeisenbergGroundPrep: {
        // Moderate random amplitudes.  Near-zero seeds sit on the |0...0>
        // plateau, where the objective is flat at ~1/2 and the line search
        // stalls before any entanglement builds up.
        PulseSchedule s = zero_schedule(n, bins, dt);
        long draw = 0;
        for (long j = 0; j < n; ++j)
            for (long l = 0; l < bins; ++l) {
                s.x[static_cast<size_t>(j)][static_cast<size_t>(l)] = 0.5 * noise(draw++);
                s.y[static_cast<size_t>(j)][static_cast<size_t>(l)] = 0.5 * noise(draw++);
            }
        return s;
    }
    }
    throw std::logic_error("make_initial_guess: unknown task");
}

OptimizeOutcome optimize_problem(const ControlProblem& problem, const TaskSetup& setup,
                                 const PulseSchedule& init, const OptimizerConfig& config,
                                 long workers) {
    validate_schedule(init);
    if (init.n != problem.n || init.bins != problem.schedule.bins)
        throw std::invalid_argument("optimize_problem: initial schedule does not match the problem");
    if (std::abs(init.dt - problem.schedule.dt) > 1e-12 * problem.schedule.dt)
        throw std::invalid_argument("optimize_problem: initial schedule uses a different bin width");

    const auto samples = sample_ensemble(problem.ensemble, problem.n);
    const long n = init.n;
    const long bins = init.bins;
    const double dt = init.dt;

    ObjectiveFn eval = [&](const std::vector<double>& v, std::vector<double>& grad) {
        PulseSchedule s = unflatten_schedule(v, n, bins, dt);
        auto [value, field] = infidelity_gradient(problem, setup, s, samples, workers);
        grad = flatten_field(field);
        return value.meanInfidelity;
    };

    OptimizerConfig cfg = config;
    if (problem.ampCap && !cfg.project) {
        const double cap = *problem.ampCap;
        if (!(cap > 0.0)) throw std::invalid_argument("optimize_problem: need a positive ampCap");
        cfg.project = [cap](std::vector<double>& v) {
            for (double& a : v) a = std::clamp(a, -cap, cap);
        };
    }

    MinimizeResult res = lbfgs_minimize(eval, flatten_schedule(init), cfg);
    OptimizeOutcome out;
    out.schedule = unflatten_schedule(res.best, n, bins, dt);
    out.objective = evaluate_infidelity(problem, setup, out.schedule, samples, workers);
    out.result = std::move(res);
    return out;
}

LadderResults ladder_optimize(const LadderPlan& plan, const TaskFactory& factory,
                              const OptimizerConfig& config, uint64_t guessSeed,
                              const std::function<void(long, double, const LadderCell&)>& onCell,
                              long workers, const LadderResults* resume) {
    if (plan.sizes.empty() || plan.errors.empty())
        throw std::invalid_argument("ladder_optimize: empty plan");
    for (size_t i = 1; i < plan.sizes.size(); ++i)
        if (plan.sizes[i] <= plan.sizes[i - 1])
            throw std::invalid_argument("ladder_optimize: sizes must be strictly increasing");
    for (size_t i = 1; i < plan.errors.size(); ++i)
        if (plan.errors[i] <= plan.errors[i - 1])
            throw std::invalid_argument("ladder_optimize: errors must be strictly increasing");

    LadderResults results;
    for (size_t si = 0; si < plan.sizes.size(); ++si) {
        const long n = plan.sizes[si];
        for (size_t ei = 0; ei < plan.errors.size(); ++ei) {
            const double deltaJ = plan.errors[ei];
            ControlProblem problem = factory(n, deltaJ);
            if (problem.n != n)
                throw std::invalid_argument("ladder_optimize: factory returned the wrong size");

            if (resume) {
                auto found = resume->find({n, deltaJ});
                if (found != resume->end()) {
                    const LadderCell& cell = found->second;
                    if (cell.schedule.n != n || cell.schedule.bins != problem.schedule.bins ||
                        cell.schedule.dt != problem.schedule.dt)
                        throw std::invalid_argument(
                            "ladder_optimize: resumed cell does not match the plan");
                    if (onCell) onCell(n, deltaJ, cell);
                    results.emplace(std::make_pair(n, deltaJ), cell);
                    continue;
                }
            }

            TaskSetup setup = make_setup(problem);

            PulseSchedule seed;
            if (ei > 0) {
                seed = results.at({n, plan.errors[ei - 1]}).schedule;
            } else if (si > 0) {
                seed = extend_schedule(results.at({plan.sizes[si - 1], deltaJ}).schedule, n);
                if (problem.schedule.bins > seed.bins)
                    seed = pad_bins(seed, problem.schedule.bins);
            } else {
                seed = make_initial_guess(problem, guessSeed);
            }

            const auto samples = sample_ensemble(problem.ensemble, n);
            const double seedValue =
                evaluate_infidelity(problem, setup, seed, samples, workers).meanInfidelity;
            OptimizeOutcome opt = optimize_problem(problem, setup, seed, config, workers);

            LadderCell cell;
            cell.seedObjective = seedValue;
            cell.iterations = static_cast<long>(opt.result.history.size()) - 1;
            cell.history = std::move(opt.result.history);
            if (opt.objective.meanInfidelity < seedValue) {
                cell.improved = true;
                cell.schedule = std::move(opt.schedule);
                cell.objective = opt.objective.meanInfidelity;
            } else {
                cell.improved = false;
                cell.schedule = seed;
                cell.objective = seedValue;
            }
            if (onCell) onCell(n, deltaJ, cell);
            results.emplace(std::make_pair(n, deltaJ), std::move(cell));
        }
    }
    return results;
}

} // namespace qoc
