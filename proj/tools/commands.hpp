#pragma once

#include "io.hpp"

#include "waveclust/waveclust.hpp"

#include <spdlog/spdlog.h>

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#ifndef WAVECLUST_VERSION
#define WAVECLUST_VERSION "0.0.0"
#endif

namespace waveclust::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitConfig = 4;

inline Json tool_info() { return {{"name", "waveclust"}, {"version", WAVECLUST_VERSION}}; }

// --- shared option groups ---------------------------------------------------------

struct SolverOptions {
    std::string solver = "cb_admm";
    std::optional<double> rho;
    double tol = 1e-6;
    int max_iters = 100000;

    SolverConfig to_config() const {
        SolverConfig cfg;
        cfg.solver = parse_solver(solver);
        cfg.rho = rho;
        cfg.tol_primal = tol;
        cfg.tol_dual = tol;
        cfg.max_iters = max_iters;
        return cfg;
    }

    void validate() const {
        parse_solver(solver);
        if (rho && !(*rho > 0.0 && std::isfinite(*rho))) throw InvalidConfig("--rho must be positive");
        if (!(tol > 0.0 && std::isfinite(tol))) throw InvalidConfig("--tol must be positive");
        if (max_iters < 1) throw InvalidConfig("--max-iters must be >= 1");
    }

    Json to_json() const {
        return {{"solver", solver}, {"rho", rho ? Json(*rho) : Json(nullptr)}, {"tol", tol}, {"max_iters", max_iters}};
    }
};

inline WaveletBasis parse_basis(const std::string& name, int levels) {
    if (levels < 0) throw InvalidConfig("--levels must be >= 0");
    try {
        return WaveletBasis{parse_family(name), levels};
    } catch (const InvalidInput& e) {
        throw InvalidConfig(e.what());
    }
}

// `start:stop:count`, inclusive; geometric spacing when `log`.
inline std::vector<double> parse_grid(const std::string& text, bool log, const char* flag) {
    const auto first = text.find(':');
    const auto second = first == std::string::npos ? std::string::npos : text.find(':', first + 1);
    if (second == std::string::npos || text.find(':', second + 1) != std::string::npos) {
        throw InvalidConfig(std::string(flag) + " must look like start:stop:count, got '" + text + "'");
    }
    double start = 0.0;
    double stop = 0.0;
    int count = 0;
    try {
        start = detail::parse_double(text.substr(0, first), flag);
        stop = detail::parse_double(text.substr(first + 1, second - first - 1), flag);
        const double c = detail::parse_double(text.substr(second + 1), flag);
        if (c != std::floor(c) || c < 1 || c > 1e6) throw InvalidConfig("");
        count = static_cast<int>(c);
    } catch (const Error&) {
        throw InvalidConfig(std::string(flag) + ": bad grid '" + text + "'");
    }
    if (start < 0.0 || stop < 0.0) throw InvalidConfig(std::string(flag) + ": values must be >= 0");
    if (log) {
        if (!(start > 0.0 && stop > 0.0)) throw InvalidConfig(std::string(flag) + ": log grid needs positive ends");
        return log_grid(start, stop, count);
    }
    return linear_grid(start, stop, count);
}

inline void require_nonnegative(double v, const char* flag) {
    if (!(v >= 0.0 && std::isfinite(v))) throw InvalidConfig(std::string(flag) + " must be finite and >= 0");
}

inline void require_input_file(const fs::path& path, const char* flag) {
    std::error_code ec;
    if (path.empty()) throw InputError(std::string(flag) + " is required");
    if (!fs::is_regular_file(path, ec)) throw InputError(std::string(flag) + ": no such file " + path.string());
}

inline void require_input_dir(const fs::path& path, const char* flag) {
    std::error_code ec;
    if (!fs::is_directory(path, ec)) throw InputError(std::string(flag) + ": no such directory " + path.string());
}

// The output directory must be an existing directory or creatable under an
// existing parent. Nothing is created until results are ready.
inline void check_output_dir(const fs::path& dir) {
    std::error_code ec;
    if (fs::exists(dir, ec)) {
        if (!fs::is_directory(dir, ec)) throw InvalidConfig("--output-dir " + dir.string() + " is not a directory");
        return;
    }
    const fs::path parent = fs::absolute(dir, ec).parent_path();
    if (!fs::is_directory(parent, ec)) {
        throw InvalidConfig("--output-dir: parent directory " + parent.string() + " does not exist");
    }
}

inline void make_output_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw InvalidConfig("cannot create " + dir.string() + ": " + ec.message());
}

inline Json layout_json(const CoefficientLayout& layout, PadMode pad) {
    Json bands = Json::array();
    for (const auto& b : layout.bands) bands.push_back({{"name", b.name}, {"start", b.start}, {"length", b.length}});
    return {{"original_length", layout.original_length},
            {"padded_length", layout.padded_length},
            {"padded", layout.padded_length != layout.original_length},
            {"pad_mode", pad == PadMode::Zero ? "zero" : "edge"},
            {"levels", layout.levels},
            {"bands", std::move(bands)}};
}

inline Json support_indices(const SupportMask& mask) {
    Json out = Json::array();
    for (std::size_t j = 0; j < mask.size(); ++j)
        if (mask[j]) out.push_back(j);
    return out;
}

inline Json report_json(const SolveReport& r) {
    return {{"solver", std::string(solver_name(r.solver))},
            {"rho", r.rho},
            {"converged", r.converged},
            {"iterations", r.iterations},
            {"inner_iterations", r.inner_iterations},
            {"wall_seconds", r.wall_seconds},
            {"primal_residual", r.primal_residual},
            {"dual_residual", r.dual_residual},
            {"objective", r.objective},
            {"warnings", r.warnings}};
}

// --- cluster ------------------------------------------------------------------------

struct ClusterOptions {
    fs::path input;
    bool header = false;
    fs::path output_dir = "waveclust_out";
    std::string basis = "db4";
    int levels = 0;
    double lambda = 1.0;
    double gamma = 1.0;
    std::optional<std::string> lambda_grid;
    std::optional<std::string> gamma_grid;
    bool log_grid = false;
    std::optional<int> knn;
    std::optional<double> phi;
    SolverOptions solver;
    std::uint64_t seed = 0;
    int jobs = default_jobs();
    std::optional<fs::path> labels;
    std::string tune = "none";
    bool trace = false;
};

inline Json cluster_config_json(const ClusterOptions& o, const std::vector<double>& lambdas,
                                const std::vector<double>& gammas) {
    return {{"input", o.input.string()},
            {"header", o.header},
            {"output_dir", o.output_dir.string()},
            {"basis", o.basis},
            {"levels", o.levels},
            {"lambda", lambdas},
            {"gamma", gammas},
            {"lambda_grid", o.lambda_grid ? Json(*o.lambda_grid) : Json(nullptr)},
            {"gamma_grid", o.gamma_grid ? Json(*o.gamma_grid) : Json(nullptr)},
            {"log_grid", o.log_grid},
            {"knn", o.knn ? Json(*o.knn) : Json(nullptr)},
            {"phi", o.phi ? Json(*o.phi) : Json(nullptr)},
            {"solver", o.solver.to_json()},
            {"seed", o.seed},
            {"jobs", o.jobs},
            {"labels", o.labels ? Json(o.labels->string()) : Json(nullptr)},
            {"tune", o.tune}};
}

inline Json grid_point_json(const GridPoint& p) {
    return {{"lambda", p.lambda},     {"gamma", p.gamma},         {"ari", p.ari},
            {"clusters", p.clusters}, {"objective", p.objective}, {"compression", p.compression},
            {"converged", p.converged}, {"iterations", p.iterations}};
}

inline void write_trace_csv(const fs::path& path, const SolveReport& r) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << "iter,primal_residual,dual_residual,objective,elapsed_seconds\n";
    for (const auto& rec : r.trace) {
        out << rec.iteration << ',' << format_double(rec.primal_residual) << ',' << format_double(rec.dual_residual)
            << ',' << format_double(rec.objective) << ',' << format_double(rec.elapsed_seconds) << '\n';
    }
}

inline int cmd_cluster(const ClusterOptions& o) {
    // Configuration first, then paths, then data.
    const WaveletBasis basis = parse_basis(o.basis, o.levels);
    o.solver.validate();
    if (o.tune != "none" && o.tune != "oracle") throw InvalidConfig("--tune must be none or oracle");
    require_nonnegative(o.lambda, "--lambda");
    require_nonnegative(o.gamma, "--gamma");
    const auto lambdas = o.lambda_grid ? parse_grid(*o.lambda_grid, o.log_grid, "--lambda-grid")
                                       : std::vector<double>{o.lambda};
    const auto gammas = o.gamma_grid ? parse_grid(*o.gamma_grid, o.log_grid, "--gamma-grid")
                                     : std::vector<double>{o.gamma};
    const bool oracle = o.tune == "oracle";
    if (oracle && !o.labels) throw InvalidConfig("--tune oracle needs --labels");
    if (!oracle && lambdas.size() * gammas.size() > 1) {
        throw InvalidConfig("a lambda/gamma grid needs --tune oracle (and --labels) to pick a point");
    }
    if (o.knn && *o.knn < 1) throw InvalidConfig("--knn must be >= 1");
    if (o.phi && !(*o.phi > 0.0 && std::isfinite(*o.phi))) throw InvalidConfig("--phi must be positive");
    if (o.jobs < 1) throw InvalidConfig("--jobs must be >= 1");

    require_input_file(o.input, "--input");
    if (o.labels) require_input_file(*o.labels, "--labels");
    check_output_dir(o.output_dir);

    const Matrix x = read_csv_matrix(o.input, o.header);
    if (x.rows() < 2) throw InputError("--input needs at least two rows");
    if (x.cols() < 2) throw InputError("--input needs at least two columns");
    std::optional<Labels> truth;
    if (o.labels) {
        truth = read_labels(*o.labels);
        if (truth->size() != static_cast<std::size_t>(x.rows())) {
            throw InputError("--labels has " + std::to_string(truth->size()) + " entries for " +
                             std::to_string(x.rows()) + " rows");
        }
    }
    if (o.knn && *o.knn > x.rows() - 1) throw InvalidConfig("--knn must be at most n - 1");
    try {
        basis.resolved_levels(next_power_of_two(static_cast<std::size_t>(x.cols())));
    } catch (const InvalidInput& e) {
        throw InvalidConfig(e.what());
    }
    spdlog::info("read {} x {} matrix from {}", x.rows(), x.cols(), o.input.string());

    PrepareOptions prep;
    prep.knn = o.knn;
    prep.phi = o.phi;
    const PreparedSignals p = prepare_signals(x, basis, prep);
    spdlog::info("padded to {}, {} fusion edges, phi {}", p.layout.padded_length, p.graph.edges.size(), p.phi);

    SolverConfig cfg = o.solver.to_config();
    cfg.trace_objective = o.trace;
    ClusteringResult result;
    Json tuning = {{"mode", o.tune}};
    if (oracle) {
        auto gs = oracle_grid_search(p, lambdas, gammas, *truth, cfg, o.jobs);
        Json points = Json::array();
        for (const auto& pt : gs.points) points.push_back(grid_point_json(pt));
        tuning["points"] = std::move(points);
        tuning["best_index"] = gs.best;
        tuning["best"] = grid_point_json(gs.points[gs.best]);
        result = std::move(gs.result);
        spdlog::info("oracle point lambda {} gamma {} ari {}", gs.points[gs.best].lambda, gs.points[gs.best].gamma,
                     gs.points[gs.best].ari);
    } else {
        result = cluster_prepared(p, lambdas.front(), gammas.front(), cfg);
    }
    for (const auto& w : result.report.warnings) spdlog::warn("{}", w);
    const double lambda = oracle ? tuning["best"]["lambda"].get<double>() : lambdas.front();
    const double gamma = oracle ? tuning["best"]["gamma"].get<double>() : gammas.front();

    Json doc;
    doc["tool"] = tool_info();
    doc["config"] = cluster_config_json(o, lambdas, gammas);
    doc["lambda"] = lambda;
    doc["gamma"] = gamma;
    doc["objective"] = result.objective;
    doc["n"] = x.rows();
    doc["clusters"] = result.cluster_count;
    doc["padding"] = layout_json(result.layout, prep.pad);
    doc["sparsity"] = {{"compression", compression(result.centroids_wavelet)},
                       {"support_size", std::count(result.support_mask.begin(), result.support_mask.end(), true)},
                       {"support", support_indices(result.support_mask)}};
    doc["graph"] = {{"knn", p.knn}, {"phi", p.phi}, {"edges", p.graph.edges.size()}};
    doc["fusion_threshold"] = result.fusion_threshold;
    doc["ari"] = truth ? Json(adjusted_rand_index(*truth, result.labels)) : Json(nullptr);
    doc["tuning"] = std::move(tuning);
    doc["solver"] = report_json(result.report);

    make_output_dir(o.output_dir);
    write_csv_matrix(o.output_dir / "centroids.csv", result.centroids);
    write_csv_matrix(o.output_dir / "centroids_wavelet.csv", result.centroids_wavelet);
    write_labels(o.output_dir / "labels.csv", result.labels);
    if (o.trace) write_trace_csv(o.output_dir / "solver_trace.csv", result.report);
    write_json(o.output_dir / "result.json", doc);
    return kExitOk;
}

// --- denoise --------------------------------------------------------------------------

struct DenoiseOptions {
    fs::path input;
    bool header = false;
    fs::path output_dir = "waveclust_out";
    std::string basis = "db4";
    int levels = 0;
    std::optional<double> fixed_sigma;
};

inline int cmd_denoise(const DenoiseOptions& o) {
    const WaveletBasis basis = parse_basis(o.basis, o.levels);
    if (o.fixed_sigma) require_nonnegative(*o.fixed_sigma, "--fixed-sigma");
    require_input_file(o.input, "--input");
    check_output_dir(o.output_dir);

    const Matrix x = read_csv_matrix(o.input, o.header);
    if (x.cols() < 2) throw InputError("--input needs at least two columns");
    try {
        basis.resolved_levels(next_power_of_two(static_cast<std::size_t>(x.cols())));
    } catch (const InvalidInput& e) {
        throw InvalidConfig(e.what());
    }
    const auto padded = pad_rows(x, basis);
    const auto r = universal_soft_denoise(padded.values, basis, o.fixed_sigma);

    Json rows = Json::array();
    for (Eigen::Index i = 0; i < r.sigma.size(); ++i) rows.push_back({{"sigma", r.sigma[i]}, {"tau", r.tau[i]}});
    Json doc;
    doc["tool"] = tool_info();
    doc["config"] = {{"input", o.input.string()},
                     {"basis", o.basis},
                     {"levels", o.levels},
                     {"fixed_sigma", o.fixed_sigma ? Json(*o.fixed_sigma) : Json(nullptr)}};
    doc["padding"] = layout_json(padded.layout, PadMode::Zero);
    doc["mad_constant"] = kMadConsistency;
    doc["rows"] = std::move(rows);

    make_output_dir(o.output_dir);
    write_csv_matrix(o.output_dir / "denoised.csv", truncate_rows(r.denoised, padded.layout));
    write_json(o.output_dir / "denoise.json", doc);
    return kExitOk;
}

// --- synth ------------------------------------------------------------------------------

struct SynthOptions {
    fs::path output_dir = "waveclust_out";
    std::string basis = "db4";
    int levels = 0;
    int classes = 3;
    int reps = 5;
    int length = 1024;
    int sparsity = 8;
    std::string snr_db = "-7.7";
    std::uint64_t seed = 0;
};

inline double parse_snr(const std::string& text) {
    if (text == "inf" || text == "+inf" || text == "infinity") return std::numeric_limits<double>::infinity();
    try {
        return detail::parse_double(text, "--snr");
    } catch (const Error&) {
        throw InvalidConfig("--snr must be a number or inf, got '" + text + "'");
    }
}

inline int cmd_synth(const SynthOptions& o) {
    const WaveletBasis basis = parse_basis(o.basis, o.levels);
    SyntheticOptions opt;
    opt.classes = o.classes;
    opt.reps = o.reps;
    opt.length = o.length;
    opt.sparsity_per_class = o.sparsity;
    opt.snr_db = parse_snr(o.snr_db);
    opt.seed = o.seed;
    check_output_dir(o.output_dir);
    SyntheticDataset ds;
    try {
        ds = generate_synthetic(basis, opt);
    } catch (const InvalidInput& e) {
        throw InvalidConfig(e.what());
    }

    Json doc;
    doc["tool"] = tool_info();
    doc["basis"] = o.basis;
    doc["levels"] = o.levels;
    doc["classes"] = o.classes;
    doc["reps"] = o.reps;
    doc["length"] = o.length;
    doc["sparsity_per_class"] = o.sparsity;
    doc["snr_db"] = std::isfinite(opt.snr_db) ? Json(opt.snr_db) : Json("inf");
    doc["noise_sigma"] = ds.noise_sigma;
    doc["seed"] = o.seed;
    doc["true_labels"] = ds.true_labels;
    doc["support"] = support_indices(ds.true_support);
    doc["true_centroids"] = matrix_to_json(ds.true_centroids);
    doc["true_coefficients"] = matrix_to_json(ds.true_coefficients);

    make_output_dir(o.output_dir);
    write_csv_matrix(o.output_dir / "X.csv", ds.x);
    write_labels(o.output_dir / "labels.csv", ds.true_labels);
    write_json(o.output_dir / "truth.json", doc);
    return kExitOk;
}

// --- metrics ------------------------------------------------------------------------------

struct MetricsOptions {
    fs::path truth;
    fs::path result;
    fs::path output_dir = "waveclust_out";
};

inline int cmd_metrics(const MetricsOptions& o) {
    require_input_file(o.truth, "--truth");
    require_input_dir(o.result, "--result");
    require_input_file(o.result / "labels.csv", "--result");
    check_output_dir(o.output_dir);

    const Json truth = read_json(o.truth);
    Labels true_labels;
    try {
        true_labels = truth.at("true_labels").get<Labels>();
    } catch (const nlohmann::json::exception& e) {
        throw InputError(o.truth.string() + ": true_labels missing or malformed");
    }
    const Labels labels = read_labels(o.result / "labels.csv");
    if (labels.size() != true_labels.size()) throw InputError("label counts differ between truth and result");

    Json doc;
    doc["tool"] = tool_info();
    doc["ari"] = adjusted_rand_index(true_labels, labels);

    // Centroid metrics need the matching files on both sides.
    auto per_sample = [&](const char* key) -> std::optional<Matrix> {
        if (!truth.contains(key)) return std::nullopt;
        const Matrix classes = matrix_from_json(truth.at(key), o.truth.string() + ": " + key);
        Matrix out(static_cast<Eigen::Index>(true_labels.size()), classes.cols());
        for (std::size_t i = 0; i < true_labels.size(); ++i) {
            if (true_labels[i] < 0 || true_labels[i] >= classes.rows()) throw InputError("true label out of range");
            out.row(static_cast<Eigen::Index>(i)) = classes.row(true_labels[i]);
        }
        return out;
    };
    doc["correlation"] = nullptr;
    const auto centroids_path = o.result / "centroids.csv";
    if (auto t = per_sample("true_centroids"); t && fs::is_regular_file(centroids_path)) {
        const Matrix est = read_csv_matrix(centroids_path);
        if (est.rows() != t->rows() || est.cols() != t->cols()) throw InputError("centroids.csv shape differs from truth");
        try {
            doc["correlation"] = centroid_correlation(*t, est);
        } catch (const InvalidInput& e) {
            spdlog::warn("correlation undefined: {}", e.what());
        }
    }
    doc["compression"] = nullptr;
    doc["f1"] = nullptr;
    const auto wavelet_path = o.result / "centroids_wavelet.csv";
    if (fs::is_regular_file(wavelet_path)) {
        const Matrix est = read_csv_matrix(wavelet_path);
        doc["compression"] = compression(est);
        if (truth.contains("support") && truth.contains("true_coefficients")) {
            const auto len = static_cast<std::size_t>(est.cols());
            SupportMask mask(len, false);
            for (const auto& j : truth.at("support")) {
                const auto idx = j.get<std::size_t>();
                if (idx >= len) throw InputError("truth support index out of range for centroids_wavelet.csv");
                mask[idx] = true;
            }
            doc["f1"] = support_f1(mask, column_support(est));
        }
    }

    make_output_dir(o.output_dir);
    write_json(o.output_dir / "metrics.json", doc);
    return kExitOk;
}

// --- bench ---------------------------------------------------------------------------------

struct BenchCliOptions {
    fs::path output_dir = "waveclust_out";
    int n = 240;
    int t = 1000;
    int clusters = 3;
    int informative = 6;
    double separation = 10.0;
    std::uint64_t seed = 0;
    double lambda = 3.0;
    double gamma = 20.0;
    std::optional<int> knn;
    std::optional<double> phi;
    std::string solvers = "cb_admm,s_admm,s_ama";
    std::optional<double> rho;
    double tol = 1e-6;
    int max_iters = 100000;
    int jobs = default_jobs();
};

inline std::vector<SolverKind> parse_solver_list(const std::string& text) {
    std::vector<SolverKind> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto name = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        const auto kind = parse_solver(std::string(detail::trim(name)));
        if (std::find(out.begin(), out.end(), kind) != out.end()) throw InvalidConfig("--solvers lists " + name + " twice");
        out.push_back(kind);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

inline void write_bench_trace(const fs::path& path, const BenchTrace& t) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << "iter,objective_gap,wall_seconds\n";
    for (std::size_t k = 0; k < t.gaps.size(); ++k)
        out << t.iterations[k] << ',' << format_double(t.gaps[k]) << ',' << format_double(t.wall_seconds[k]) << '\n';
}

inline int cmd_bench(const BenchCliOptions& o) {
    const auto kinds = parse_solver_list(o.solvers);
    if (o.n < 2 || o.t < 1) throw InvalidConfig("--n must be >= 2 and --t >= 1");
    if (o.clusters < 1 || o.clusters > o.n) throw InvalidConfig("--clusters must be in [1, n]");
    if (o.informative < 0 || o.informative > o.t) throw InvalidConfig("--informative must be in [0, t]");
    require_nonnegative(o.separation, "--separation");
    require_nonnegative(o.lambda, "--lambda");
    require_nonnegative(o.gamma, "--gamma");
    if (!(o.tol > 0.0)) throw InvalidConfig("--tol must be positive");
    if (o.max_iters < 1) throw InvalidConfig("--max-iters must be >= 1");
    if (o.rho && !(*o.rho > 0.0)) throw InvalidConfig("--rho must be positive");
    if (o.knn && (*o.knn < 1 || *o.knn > o.n - 1)) throw InvalidConfig("--knn must be in [1, n - 1]");
    if (o.phi && !(*o.phi > 0.0)) throw InvalidConfig("--phi must be positive");
    if (o.jobs < 1) throw InvalidConfig("--jobs must be >= 1");
    check_output_dir(o.output_dir);

    const auto inst = generate_bench_instance(o.n, o.t, o.clusters, o.informative, o.seed, o.separation);
    const int knn = o.knn.value_or(default_knn(o.n));
    const double phi = o.phi.value_or(auto_phi(inst.x));
    const auto graph = gaussian_knn_weights(inst.x, knn, phi);
    const Vector omega = variance_sparsity_weights(inst.x);
    const ProblemSpec spec = make_problem_spec(inst.x, o.lambda, o.gamma, graph, omega);
    spec.validate();

    BenchOptions opt;
    opt.gap_tol = o.tol;
    opt.max_iters = o.max_iters;
    opt.rho = o.rho;
    spdlog::info("bench {} x {}, {} edges; reference solve", o.n, o.t, graph.edges.size());
    const auto ref = reference_objective(spec, opt);
    spdlog::info("reference objective {} after {} iterations", ref.objective, ref.iterations);

    std::vector<BenchTrace> traces(kinds.size());
    parallel_for(kinds.size(), o.jobs, [&](std::size_t i) {
        traces[i] = bench_solver(spec, kinds[i], ref.objective, opt);
        spdlog::info("{}: {} iterations, {} s", solver_name(kinds[i]), traces[i].iterations.size(),
                     traces[i].total_seconds);
    });

    Json solvers = Json::array();
    for (const auto& t : traces) {
        if (!t.reached) spdlog::warn("{} stopped before reaching the gap tolerance", solver_name(t.solver));
        solvers.push_back({{"solver", std::string(solver_name(t.solver))},
                           {"reached", t.reached},
                           {"iterations_to_tol", t.reached ? Json(t.iterations_to_tol) : Json(nullptr)},
                           {"seconds_to_tol", t.reached ? Json(t.seconds_to_tol) : Json(nullptr)},
                           {"iterations", t.iterations.size()},
                           {"total_seconds", t.total_seconds},
                           {"final_gap", t.gaps.empty() ? Json(nullptr) : Json(t.gaps.back())},
                           {"inner_iterations", t.inner_iterations},
                           {"trace_file", "trace_" + std::string(solver_name(t.solver)) + ".csv"}});
    }
    Json doc;
    doc["tool"] = tool_info();
    doc["config"] = {{"n", o.n},
                     {"t", o.t},
                     {"clusters", o.clusters},
                     {"informative", o.informative},
                     {"separation", o.separation},
                     {"seed", o.seed},
                     {"lambda", o.lambda},
                     {"gamma", o.gamma},
                     {"knn", knn},
                     {"phi", phi},
                     {"rho", o.rho ? Json(*o.rho) : Json(nullptr)},
                     {"gap_tol", o.tol},
                     {"max_iters", o.max_iters},
                     {"jobs", o.jobs},
                     {"solvers", o.solvers}};
    doc["edges"] = graph.edges.size();
    doc["reference"] = {{"objective", ref.objective},
                        {"iterations", ref.iterations},
                        {"converged", ref.converged},
                        {"tol", opt.reference_tol}};
    doc["solvers"] = std::move(solvers);

    make_output_dir(o.output_dir);
    for (const auto& t : traces)
        write_bench_trace(o.output_dir / ("trace_" + std::string(solver_name(t.solver)) + ".csv"), t);
    write_json(o.output_dir / "summary.json", doc);
    return kExitOk;
}

}  // namespace waveclust::cli
