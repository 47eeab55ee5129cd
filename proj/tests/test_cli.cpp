// Runs the built waveclust binary end to end. Paths of the binary, the schema
// and the Python interpreter come in as compile definitions.

#include "io.hpp"

#include "waveclust/eval.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace waveclust;
using cli::Json;
namespace fs = std::filesystem;

std::string quote(const std::string& s) { return "'" + s + "'"; }

// Fresh directory per test, removed afterwards.
class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / ("waveclust_cli_" + std::string(info->name()) + "_" +
                                            std::to_string(::getpid()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path path(const std::string& name) const { return dir_ / name; }

    int run(const std::string& args) const {
        const std::string cmd = quote(WAVECLUST_BIN) + " " + args + " >" + quote(path("stdout.txt").string()) +
                                " 2>" + quote(path("stderr.txt").string());
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    std::string stderr_text() const {
        std::ifstream in(path("stderr.txt"));
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    }

    bool schema_valid(const fs::path& result) const {
        const std::string cmd = quote(WAVECLUST_PYTHON) + " " + quote(WAVECLUST_SCHEMA_CHECK) + " " +
                                quote(WAVECLUST_SCHEMA) + " " + quote(result.string());
        return std::system(cmd.c_str()) == 0;
    }

    fs::path dir_;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Matrix random_matrix(Eigen::Index n, Eigen::Index t, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Matrix m(n, t);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
    return m;
}

TEST_F(CliTest, VersionAndHelpExitZero) {
    EXPECT_EQ(run("--version"), 0);
    EXPECT_EQ(run("--help"), 0);
    EXPECT_EQ(run("cluster --help"), 0);
}

TEST_F(CliTest, MissingInputExits2WithoutOutputs) {
    const auto out = path("out");
    EXPECT_EQ(run("cluster --input " + quote(path("nope.csv").string()) + " --output-dir " + quote(out.string())), 2);
    EXPECT_FALSE(fs::exists(out));
    EXPECT_NE(stderr_text().find("nope.csv"), std::string::npos);
}

TEST_F(CliTest, MalformedInputExits2) {
    const auto out = path("out");
    {
        std::ofstream f(path("ragged.csv"));
        f << "1,2,3\n4,5\n";
    }
    EXPECT_EQ(run("cluster --input " + quote(path("ragged.csv").string()) + " --output-dir " + quote(out.string())), 2);
    {
        std::ofstream f(path("text.csv"));
        f << "1,2,x\n4,5,6\n";
    }
    EXPECT_EQ(run("cluster --input " + quote(path("text.csv").string()) + " --output-dir " + quote(out.string())), 2);
    {
        std::ofstream f(path("nan.csv"));
        f << "1,2,nan\n4,5,6\n";
    }
    EXPECT_EQ(run("cluster --input " + quote(path("nan.csv").string()) + " --output-dir " + quote(out.string())), 2);
    EXPECT_FALSE(fs::exists(out));
}

TEST_F(CliTest, InvalidConfigExits4) {
    cli::write_csv_matrix(path("x.csv"), random_matrix(6, 16, 1));
    const std::string in = " --input " + quote(path("x.csv").string()) + " --output-dir " + quote(path("out").string());
    EXPECT_EQ(run("cluster" + in + " --basis db5"), 4);
    EXPECT_EQ(run("cluster" + in + " --lambda -1"), 4);
    EXPECT_EQ(run("cluster" + in + " --solver newton"), 4);
    EXPECT_EQ(run("cluster" + in + " --tune oracle"), 4);
    EXPECT_EQ(run("cluster" + in + " --lambda-grid 0:1"), 4);
    EXPECT_EQ(run("cluster" + in + " --knn 6"), 4);
    EXPECT_EQ(run("cluster" + in + " --levels 9"), 4);
    EXPECT_EQ(run("cluster" + in + " --no-such-flag"), 4);
    EXPECT_EQ(run("cluster" + in + " --solver s_ama --rho 100"), 4);
    EXPECT_EQ(run("bench --solvers cb_admm,foo --output-dir " + quote(path("b").string())), 4);
    EXPECT_FALSE(fs::exists(path("out")));
    EXPECT_FALSE(fs::exists(path("b")));
}

TEST_F(CliTest, CsvRoundTripIsExact) {
    Matrix m = random_matrix(7, 13, 2);
    m(0, 0) = 1e-300;
    m(1, 1) = -123456789.123456789;
    m(2, 2) = 0.1;
    cli::write_csv_matrix(path("m.csv"), m);
    const Matrix back = cli::read_csv_matrix(path("m.csv"));
    ASSERT_EQ(back.rows(), m.rows());
    ASSERT_EQ(back.cols(), m.cols());
    for (Eigen::Index i = 0; i < m.size(); ++i) EXPECT_EQ(back.data()[i], m.data()[i]);
}

TEST_F(CliTest, HeaderFlagSkipsFirstLine) {
    {
        std::ofstream f(path("h.csv"));
        f << "a,b,c,d\n1,2,3,4\n5,6,7,8\n";
    }
    const Matrix m = cli::read_csv_matrix(path("h.csv"), true);
    EXPECT_EQ(m.rows(), 2);
    EXPECT_EQ(m(1, 3), 8.0);
    EXPECT_THROW(cli::read_csv_matrix(path("h.csv"), false), cli::InputError);
}

TEST_F(CliTest, UnpenalizedClusterReturnsInput) {
    // 40 columns: exercises padding to 64 and truncation on the way back.
    const Matrix x = random_matrix(6, 40, 3);
    cli::write_csv_matrix(path("x.csv"), x);
    const auto out = path("out");
    ASSERT_EQ(run("cluster --input " + quote(path("x.csv").string()) + " --basis db4 --lambda 0 --gamma 0 --tol 1e-10" +
                  " --output-dir " + quote(out.string())),
              0)
        << stderr_text();
    const Matrix c = cli::read_csv_matrix(out / "centroids.csv");
    ASSERT_EQ(c.rows(), x.rows());
    ASSERT_EQ(c.cols(), x.cols());
    EXPECT_LT((c - x).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_EQ(cli::read_csv_matrix(out / "centroids_wavelet.csv").cols(), 64);
    EXPECT_EQ(cli::read_labels(out / "labels.csv").size(), 6u);

    const Json r = cli::read_json(out / "result.json");
    EXPECT_EQ(r["padding"]["original_length"], 40);
    EXPECT_EQ(r["padding"]["padded_length"], 64);
    EXPECT_EQ(r["padding"]["padded"], true);
    EXPECT_EQ(r["clusters"], 6);
    EXPECT_TRUE(schema_valid(out / "result.json"));
}

TEST_F(CliTest, TraceFileHasHeader) {
    cli::write_csv_matrix(path("x.csv"), random_matrix(8, 32, 4));
    const auto out = path("out");
    ASSERT_EQ(run("cluster --input " + quote(path("x.csv").string()) + " --trace --output-dir " + quote(out.string())), 0);
    const std::string trace = slurp(out / "solver_trace.csv");
    EXPECT_EQ(trace.substr(0, trace.find('\n')).substr(0, 5), "iter,");
}

TEST_F(CliTest, OracleGridIsRecorded) {
    const auto s = path("s");
    ASSERT_EQ(run("synth --seed 3 --output-dir " + quote(s.string())), 0);
    const auto out = path("out");
    ASSERT_EQ(run("cluster --input " + quote((s / "X.csv").string()) + " --labels " + quote((s / "labels.csv").string()) +
                  " --tune oracle --lambda-grid 0:10:21 --gamma-grid 0:5:11 --tol 1e-4 --output-dir " + quote(out.string())),
              0)
        << stderr_text();
    const Json r = cli::read_json(out / "result.json");
    const auto& points = r["tuning"]["points"];
    ASSERT_EQ(points.size(), 21u * 11u);
    double best_ari = -2.0;
    for (const auto& p : points) best_ari = std::max(best_ari, p["ari"].get<double>());
    const auto& best = r["tuning"]["best"];
    EXPECT_EQ(best["ari"].get<double>(), best_ari);
    EXPECT_EQ(points[r["tuning"]["best_index"].get<std::size_t>()], best);
    EXPECT_EQ(r["lambda"], best["lambda"]);
    EXPECT_EQ(r["gamma"], best["gamma"]);
    EXPECT_EQ(r["ari"], best["ari"]);
    EXPECT_TRUE(schema_valid(out / "result.json"));
}

TEST_F(CliTest, OracleGridIndependentOfJobs) {
    const auto s = path("s");
    ASSERT_EQ(run("synth --seed 5 --output-dir " + quote(s.string())), 0);
    const std::string args = "cluster --input " + quote((s / "X.csv").string()) + " --labels " +
                             quote((s / "labels.csv").string()) + " --tune oracle --log-grid --lambda-grid 0.3:10:4" +
                             " --gamma-grid 0.5:4:3";
    ASSERT_EQ(run(args + " --jobs 1 --output-dir " + quote(path("a").string())), 0);
    ASSERT_EQ(run(args + " --jobs 3 --output-dir " + quote(path("b").string())), 0);
    EXPECT_EQ(slurp(path("a") / "centroids.csv"), slurp(path("b") / "centroids.csv"));
    EXPECT_EQ(slurp(path("a") / "labels.csv"), slurp(path("b") / "labels.csv"));
}

TEST_F(CliTest, SynthDefaultsAndDeterminism) {
    ASSERT_EQ(run("synth --seed 11 --output-dir " + quote(path("a").string())), 0);
    ASSERT_EQ(run("synth --seed 11 --output-dir " + quote(path("b").string())), 0);
    for (const char* f : {"X.csv", "labels.csv", "truth.json"}) {
        EXPECT_EQ(slurp(path("a") / f), slurp(path("b") / f)) << f;
    }
    const Matrix x = cli::read_csv_matrix(path("a") / "X.csv");
    EXPECT_EQ(x.rows(), 15);
    EXPECT_EQ(x.cols(), 1024);
    const Json t = cli::read_json(path("a") / "truth.json");
    EXPECT_DOUBLE_EQ(t["snr_db"].get<double>(), -7.7);
    EXPECT_EQ(t["seed"], 11);
    EXPECT_EQ(t["true_labels"].size(), 15u);

    ASSERT_EQ(run("synth --seed 12 --output-dir " + quote(path("c").string())), 0);
    EXPECT_NE(slurp(path("a") / "X.csv"), slurp(path("c") / "X.csv"));
}

// Builds a result directory holding the true per-sample centroids.
void write_truth_as_result(const fs::path& truth, const fs::path& dir, const Labels& labels) {
    const Json t = cli::read_json(truth);
    const Labels truth_labels = t["true_labels"].get<Labels>();
    const Matrix cent = cli::matrix_from_json(t["true_centroids"], "true_centroids");
    const Matrix coef = cli::matrix_from_json(t["true_coefficients"], "true_coefficients");
    Matrix c(static_cast<Eigen::Index>(truth_labels.size()), cent.cols());
    Matrix w(static_cast<Eigen::Index>(truth_labels.size()), coef.cols());
    for (std::size_t i = 0; i < truth_labels.size(); ++i) {
        c.row(static_cast<Eigen::Index>(i)) = cent.row(truth_labels[i]);
        w.row(static_cast<Eigen::Index>(i)) = coef.row(truth_labels[i]);
    }
    fs::create_directories(dir);
    cli::write_csv_matrix(dir / "centroids.csv", c);
    cli::write_csv_matrix(dir / "centroids_wavelet.csv", w);
    cli::write_labels(dir / "labels.csv", labels);
}

TEST_F(CliTest, MetricsOfTruthArePerfect) {
    ASSERT_EQ(run("synth --seed 2 --output-dir " + quote(path("s").string())), 0);
    const Json t = cli::read_json(path("s") / "truth.json");
    write_truth_as_result(path("s") / "truth.json", path("r"), t["true_labels"].get<Labels>());
    ASSERT_EQ(run("metrics --truth " + quote((path("s") / "truth.json").string()) + " --result " +
                  quote(path("r").string()) + " --output-dir " + quote(path("m").string())),
              0)
        << stderr_text();
    const Json m = cli::read_json(path("m") / "metrics.json");
    EXPECT_DOUBLE_EQ(m["ari"].get<double>(), 1.0);
    EXPECT_NEAR(m["correlation"].get<double>(), 1.0, 1e-12);
    EXPECT_DOUBLE_EQ(m["f1"].get<double>(), 1.0);
    const Matrix coef = cli::matrix_from_json(t["true_coefficients"], "true_coefficients");
    EXPECT_DOUBLE_EQ(m["compression"].get<double>(), compression(coef));
}

TEST_F(CliTest, MetricsIgnoreLabelNames) {
    ASSERT_EQ(run("synth --seed 2 --output-dir " + quote(path("s").string())), 0);
    const Json t = cli::read_json(path("s") / "truth.json");
    Labels permuted = t["true_labels"].get<Labels>();
    for (int& l : permuted) l = (l + 1) % 3 + 7;
    fs::create_directories(path("r"));
    cli::write_labels(path("r") / "labels.csv", permuted);
    ASSERT_EQ(run("metrics --truth " + quote((path("s") / "truth.json").string()) + " --result " +
                  quote(path("r").string()) + " --output-dir " + quote(path("m").string())),
              0);
    const Json m = cli::read_json(path("m") / "metrics.json");
    EXPECT_DOUBLE_EQ(m["ari"].get<double>(), 1.0);
    EXPECT_TRUE(m["correlation"].is_null());
    EXPECT_TRUE(m["compression"].is_null());
}

TEST_F(CliTest, MetricsFourPointExample) {
    // Contingency table gives index 1, expected 1, max 2.5.
    Json truth;
    truth["true_labels"] = {0, 0, 1, 1};
    cli::write_json(path("truth.json"), truth);
    fs::create_directories(path("r"));
    cli::write_labels(path("r") / "labels.csv", {0, 1, 1, 1});
    ASSERT_EQ(run("metrics --truth " + quote(path("truth.json").string()) + " --result " + quote(path("r").string()) +
                  " --output-dir " + quote(path("m").string())),
              0);
    EXPECT_NEAR(cli::read_json(path("m") / "metrics.json")["ari"].get<double>(), 0.0, 1e-12);
}

TEST_F(CliTest, MetricsRejectsMismatchedCounts) {
    Json truth;
    truth["true_labels"] = {0, 0, 1, 1};
    cli::write_json(path("truth.json"), truth);
    fs::create_directories(path("r"));
    cli::write_labels(path("r") / "labels.csv", {0, 1, 0});
    EXPECT_EQ(run("metrics --truth " + quote(path("truth.json").string()) + " --result " + quote(path("r").string()) +
                  " --output-dir " + quote(path("m").string())),
              2);
    EXPECT_FALSE(fs::exists(path("m")));
}

TEST_F(CliTest, DenoiseZeroGivesZero) {
    cli::write_csv_matrix(path("z.csv"), Matrix::Zero(3, 100));
    ASSERT_EQ(run("denoise --input " + quote(path("z.csv").string()) + " --output-dir " + quote(path("d").string())), 0)
        << stderr_text();
    const Matrix d = cli::read_csv_matrix(path("d") / "denoised.csv");
    EXPECT_EQ(d.rows(), 3);
    EXPECT_EQ(d.cols(), 100);
    EXPECT_EQ(d.cwiseAbs().maxCoeff(), 0.0);
}

TEST_F(CliTest, DenoiseReportsUniversalThreshold) {
    cli::write_csv_matrix(path("x.csv"), random_matrix(2, 1024, 5));
    ASSERT_EQ(run("denoise --input " + quote(path("x.csv").string()) + " --fixed-sigma 1 --output-dir " +
                  quote(path("d").string())),
              0);
    const Json j = cli::read_json(path("d") / "denoise.json");
    ASSERT_EQ(j["rows"].size(), 2u);
    for (const auto& row : j["rows"]) {
        EXPECT_DOUBLE_EQ(row["sigma"].get<double>(), 1.0);
        EXPECT_NEAR(row["tau"].get<double>(), 3.7233, 1e-3);
    }
}

TEST_F(CliTest, DenoiseTwiceEqualsDoubleThreshold) {
    // Soft thresholding composes additively, so two passes at a fixed sigma
    // equal one pass at twice the sigma (tau is linear in sigma).
    cli::write_csv_matrix(path("x.csv"), 4.0 * random_matrix(2, 256, 6));
    auto denoise = [&](const fs::path& in, const char* sigma, const char* out) {
        return run("denoise --basis haar --input " + quote(in.string()) + " --fixed-sigma " + sigma + " --output-dir " +
                   quote(path(out).string()));
    };
    ASSERT_EQ(denoise(path("x.csv"), "1", "d1"), 0);
    ASSERT_EQ(denoise(path("d1") / "denoised.csv", "1", "d2"), 0);
    ASSERT_EQ(denoise(path("x.csv"), "2", "dd"), 0);
    const Matrix twice = cli::read_csv_matrix(path("d2") / "denoised.csv");
    const Matrix doubled = cli::read_csv_matrix(path("dd") / "denoised.csv");
    EXPECT_GT(doubled.norm(), 0.0);
    EXPECT_LT((twice - doubled).cwiseAbs().maxCoeff(), 1e-10);
}

TEST_F(CliTest, BenchSingleSolverWritesOneTrace) {
    const auto out = path("b");
    ASSERT_EQ(run("bench --n 30 --t 64 --clusters 3 --informative 6 --lambda 3 --gamma 5 --solvers cb_admm" +
                  std::string(" --output-dir ") + quote(out.string())),
              0)
        << stderr_text();
    std::set<std::string> traces;
    for (const auto& e : fs::directory_iterator(out)) {
        const auto name = e.path().filename().string();
        if (name.rfind("trace_", 0) == 0) traces.insert(name);
    }
    EXPECT_EQ(traces, std::set<std::string>{"trace_cb_admm.csv"});
    const Json s = cli::read_json(out / "summary.json");
    ASSERT_EQ(s["solvers"].size(), 1u);
    EXPECT_EQ(s["solvers"][0]["solver"], "cb_admm");
}

TEST_F(CliTest, BenchTracesEndBelowTolerance) {
    const auto out = path("b");
    ASSERT_EQ(run("bench --n 40 --t 80 --lambda 3 --gamma 5 --solvers cb_admm,s_admm,s_ama,pg_admm --tol 1e-6"
                  " --output-dir " + quote(out.string())),
              0)
        << stderr_text();
    const Json s = cli::read_json(out / "summary.json");
    ASSERT_EQ(s["solvers"].size(), 4u);
    for (const auto& sv : s["solvers"]) {
        EXPECT_TRUE(sv["reached"].get<bool>()) << sv["solver"];
        const std::string text = slurp(out / sv["trace_file"].get<std::string>());
        std::istringstream in(text);
        std::string line, last;
        std::getline(in, line);
        EXPECT_EQ(line, "iter,objective_gap,wall_seconds");
        int rows = 0;
        while (std::getline(in, line)) {
            if (!line.empty()) last = line, ++rows;
        }
        ASSERT_GT(rows, 0);
        const auto c1 = last.find(',');
        const auto c2 = last.find(',', c1 + 1);
        const double gap = std::stod(last.substr(c1 + 1, c2 - c1 - 1));
        EXPECT_LE(gap, 1e-6) << sv["solver"];
        EXPECT_EQ(std::stoi(last.substr(0, c1)), sv["iterations_to_tol"].get<int>()) << sv["solver"];
    }
}

}  // namespace
