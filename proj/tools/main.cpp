#include "commands.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>

#include <cstdlib>
#include <iostream>

namespace {

using namespace waveclust;
using namespace waveclust::cli;

// WAVECLUST_LOG = off | info | debug (default off). Errors are always
// printed, independently of this setting.
void configure_logging() {
    auto logger = spdlog::stderr_logger_st("waveclust");
    logger->set_pattern("[waveclust] [%l] %v");
    const char* env = std::getenv("WAVECLUST_LOG");
    const std::string level = env ? env : "off";
    if (level == "debug") {
        logger->set_level(spdlog::level::debug);
    } else if (level == "info") {
        logger->set_level(spdlog::level::info);
    } else {
        logger->set_level(spdlog::level::off);
    }
    spdlog::set_default_logger(logger);
}

void add_solver_flags(CLI::App* cmd, SolverOptions& s) {
    cmd->add_option("--solver", s.solver, "cb_admm, s_admm, s_ama or pg_admm")->capture_default_str();
    cmd->add_option("--rho", s.rho, "augmented Lagrangian parameter (S-AMA: step size)");
    cmd->add_option("--tol", s.tol, "relative primal and dual residual tolerance")->capture_default_str();
    cmd->add_option("--max-iters", s.max_iters, "iteration cap")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    configure_logging();
    CLI::App app{"Sparse convex wavelet clustering"};
    app.set_version_flag("--version", WAVECLUST_VERSION);
    app.require_subcommand(1);

    ClusterOptions cluster;
    auto* c = app.add_subcommand("cluster", "cluster the rows of a CSV matrix");
    c->add_option("--input", cluster.input, "n x T CSV, one signal per row")->required();
    c->add_flag("--header", cluster.header, "skip the first line of the input");
    c->add_option("--output-dir", cluster.output_dir)->capture_default_str();
    c->add_option("--basis", cluster.basis, "haar, db4 or db8")->capture_default_str();
    c->add_option("--levels", cluster.levels, "decomposition depth, 0 = maximal")->capture_default_str();
    c->add_option("--lambda", cluster.lambda, "fusion penalty")->capture_default_str();
    c->add_option("--gamma", cluster.gamma, "sparsity penalty")->capture_default_str();
    c->add_option("--lambda-grid", cluster.lambda_grid, "start:stop:count");
    c->add_option("--gamma-grid", cluster.gamma_grid, "start:stop:count");
    c->add_flag("--log-grid", cluster.log_grid, "geometric instead of linear grid spacing");
    c->add_option("--knn", cluster.knn, "neighbours in the fusion graph");
    c->add_option("--phi", cluster.phi, "Gaussian kernel scale (default 1 / median squared distance)");
    add_solver_flags(c, cluster.solver);
    c->add_option("--seed", cluster.seed, "recorded for reproducibility")->capture_default_str();
    c->add_option("--jobs", cluster.jobs, "worker threads for grid search")->capture_default_str();
    c->add_option("--labels", cluster.labels, "true labels, one per row");
    c->add_option("--tune", cluster.tune, "none or oracle")->capture_default_str();
    c->add_flag("--trace", cluster.trace, "write solver_trace.csv with per-iteration residuals");

    DenoiseOptions denoise;
    auto* d = app.add_subcommand("denoise", "universal soft-threshold wavelet denoising per row");
    d->add_option("--input", denoise.input)->required();
    d->add_flag("--header", denoise.header);
    d->add_option("--output-dir", denoise.output_dir)->capture_default_str();
    d->add_option("--basis", denoise.basis)->capture_default_str();
    d->add_option("--levels", denoise.levels)->capture_default_str();
    d->add_option("--fixed-sigma", denoise.fixed_sigma, "use this noise level instead of the MAD estimate");

    SynthOptions synth;
    auto* s = app.add_subcommand("synth", "generate the synthetic wavelet-sparse study data");
    s->add_option("--output-dir", synth.output_dir)->capture_default_str();
    s->add_option("--basis", synth.basis)->capture_default_str();
    s->add_option("--levels", synth.levels)->capture_default_str();
    s->add_option("--classes", synth.classes)->capture_default_str();
    s->add_option("--reps", synth.reps)->capture_default_str();
    s->add_option("--length", synth.length)->capture_default_str();
    s->add_option("--sparsity", synth.sparsity, "nonzero coefficients per class")->capture_default_str();
    s->add_option("--snr", synth.snr_db, "dB, or inf for noiseless")->capture_default_str();
    s->add_option("--seed", synth.seed)->capture_default_str();

    MetricsOptions metrics;
    auto* m = app.add_subcommand("metrics", "score a clustering result against synthetic truth");
    m->add_option("--truth", metrics.truth, "truth.json written by synth")->required();
    m->add_option("--result", metrics.result, "output directory of cluster")->required();
    m->add_option("--output-dir", metrics.output_dir)->capture_default_str();

    BenchCliOptions bench;
    auto* b = app.add_subcommand("bench", "time the solvers on a generated instance");
    b->add_option("--output-dir", bench.output_dir)->capture_default_str();
    b->add_option("--n", bench.n)->capture_default_str();
    b->add_option("--t", bench.t)->capture_default_str();
    b->add_option("--clusters", bench.clusters)->capture_default_str();
    b->add_option("--informative", bench.informative)->capture_default_str();
    b->add_option("--separation", bench.separation, "cluster means drawn from U[-s, s]")->capture_default_str();
    b->add_option("--seed", bench.seed)->capture_default_str();
    b->add_option("--lambda", bench.lambda)->capture_default_str();
    b->add_option("--gamma", bench.gamma)->capture_default_str();
    b->add_option("--knn", bench.knn);
    b->add_option("--phi", bench.phi);
    b->add_option("--solvers", bench.solvers, "comma separated")->capture_default_str();
    b->add_option("--rho", bench.rho);
    b->add_option("--tol", bench.tol, "relative objective gap to reach")->capture_default_str();
    b->add_option("--max-iters", bench.max_iters)->capture_default_str();
    b->add_option("--jobs", bench.jobs)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (c->parsed()) return cmd_cluster(cluster);
        if (d->parsed()) return cmd_denoise(denoise);
        if (s->parsed()) return cmd_synth(synth);
        if (m->parsed()) return cmd_metrics(metrics);
        if (b->parsed()) return cmd_bench(bench);
    } catch (const InvalidConfig& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const NumericalFailure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const Error& e) {
        // InputError, InvalidInput and file-system failures.
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
    return kExitConfig;
}
