#include "qoc/cli.hpp"

#include "CLI11.hpp"

#include <cstdint>
#include <cstdio>
#include <exception>
#include <optional>
#include <stdexcept>
#include <string>

namespace {

struct CommonFlags {
    std::string configPath;
    std::optional<std::string> outDir;
    std::optional<long> workers;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool needsConfig) {
    auto* config = cmd->add_option("--config", flags.configPath, "run configuration file");
    if (needsConfig) config->required();
    cmd->add_option("--out", flags.outDir, "output directory (overrides out_dir)");
    cmd->add_option("--workers", flags.workers, "worker threads, 0 = hardware concurrency")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--seed", flags.seed, "base seed (overrides the config)");
}

qoc::RunConfig load_with_overrides(const CommonFlags& flags) {
    qoc::RunConfig cfg = qoc::load_run_config(flags.configPath);
    if (flags.outDir) cfg.outDir = *flags.outDir;
    if (flags.workers) cfg.workers = *flags.workers;
    if (flags.seed) cfg.seed = *flags.seed;
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"tensor-network optimizer for robust spin-chain control"};
    app.require_subcommand(1);

    CommonFlags optimizeFlags;
    bool optimizeResume = false;
    CLI::App* optimize = app.add_subcommand("optimize", "run the warm-start ladder and verify");
    add_common(optimize, optimizeFlags, true);
    optimize->add_flag("--resume", optimizeResume, "adopt finished cells from the checkpoint");

    CommonFlags evaluateFlags;
    std::string evaluateSchedule;
    CLI::App* evaluate = app.add_subcommand("evaluate", "re-verify a stored schedule");
    add_common(evaluate, evaluateFlags, true);
    evaluate->add_option("--schedule", evaluateSchedule, "stored schedule file")->required();

    CommonFlags sweepFlags;
    bool sweepResume = false;
    CLI::App* sweep = app.add_subcommand("sweep", "size sweep comparing plain and robust runs");
    add_common(sweep, sweepFlags, true);
    sweep->add_flag("--resume", sweepResume, "adopt finished cells from the checkpoint");

    std::string heatmapSchedule;
    std::string heatmapOut;
    CLI::App* heatmap = app.add_subcommand("heatmap", "export amplitude matrices as CSV");
    heatmap->add_option("--schedule", heatmapSchedule, "stored schedule file")->required();
    heatmap->add_option("--out", heatmapOut, "output directory (default: beside the schedule)");

    CommonFlags gradcheckFlags;
    CLI::App* gradcheck =
        app.add_subcommand("gradcheck", "finite-difference and dense-propagation audit");
    add_common(gradcheck, gradcheckFlags, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (optimize->parsed()) return qoc::cmd_optimize(load_with_overrides(optimizeFlags), optimizeResume);
        if (evaluate->parsed())
            return qoc::cmd_evaluate(load_with_overrides(evaluateFlags), evaluateSchedule);
        if (sweep->parsed()) return qoc::cmd_sweep(load_with_overrides(sweepFlags), sweepResume);
        if (heatmap->parsed()) return qoc::cmd_heatmap(heatmapSchedule, heatmapOut);
        if (gradcheck->parsed()) return qoc::cmd_gradcheck(load_with_overrides(gradcheckFlags));
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 2;
    }
    return 1;
}
