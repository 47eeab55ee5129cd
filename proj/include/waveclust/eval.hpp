#pragma once

// Clustering and recovery metrics, and seeded synthetic data generators.

#include "waveclust/error.hpp"
#include "waveclust/matrix.hpp"
#include "waveclust/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <vector>

namespace waveclust {

using SupportMask = std::vector<bool>;

// Hubert-Arabie adjusted Rand index from the pair-counting contingency table.
// Two all-singleton or two single-cluster partitions (Max == Expected) score 1.
inline double adjusted_rand_index(const Labels& a, const Labels& b) {
    detail::require(a.size() == b.size(), "adjusted_rand_index: label vectors differ in length");
    detail::require(a.size() >= 2, "adjusted_rand_index: need at least two observations");
    std::map<std::pair<int, int>, double> table;
    std::map<int, double> rows;
    std::map<int, double> cols;
    for (std::size_t i = 0; i < a.size(); ++i) {
        table[{a[i], b[i]}] += 1.0;
        rows[a[i]] += 1.0;
        cols[b[i]] += 1.0;
    }
    auto pairs = [](double m) { return 0.5 * m * (m - 1.0); };
    double index = 0.0;
    for (const auto& [key, m] : table) index += pairs(m);
    double sum_a = 0.0;
    for (const auto& [key, m] : rows) sum_a += pairs(m);
    double sum_b = 0.0;
    for (const auto& [key, m] : cols) sum_b += pairs(m);
    const double expected = sum_a * sum_b / pairs(static_cast<double>(a.size()));
    const double max_index = 0.5 * (sum_a + sum_b);
    if (max_index == expected) return 1.0;
    return (index - expected) / (max_index - expected);
}

// Pearson correlation of the two matrices flattened to vectors.
inline double centroid_correlation(const Matrix& truth, const Matrix& estimate) {
    detail::require(truth.rows() == estimate.rows() && truth.cols() == estimate.cols(),
                    "centroid_correlation: shapes differ");
    detail::require(truth.size() >= 2, "centroid_correlation: need at least two entries");
    const auto count = static_cast<double>(truth.size());
    const Eigen::ArrayXXd a = truth.array() - truth.sum() / count;
    const Eigen::ArrayXXd b = estimate.array() - estimate.sum() / count;
    const double saa = a.square().sum();
    const double sbb = b.square().sum();
    if (!(saa > 0.0) || !(sbb > 0.0)) throw InvalidInput("centroid_correlation: zero-variance input");
    return (a * b).sum() / std::sqrt(saa * sbb);
}

// Fraction of exactly-zero entries.
inline double compression(const Matrix& u_wavelet) {
    if (u_wavelet.size() == 0) return 1.0;
    const auto zeros = (u_wavelet.array() == 0.0).count();
    return static_cast<double>(zeros) / static_cast<double>(u_wavelet.size());
}

// Columns with at least one nonzero entry.
inline SupportMask column_support(const Matrix& m) {
    SupportMask mask(static_cast<std::size_t>(m.cols()), false);
    for (Eigen::Index j = 0; j < m.cols(); ++j) mask[static_cast<std::size_t>(j)] = (m.col(j).array() != 0.0).any();
    return mask;
}

// F1 of the estimated nonzero set against the true one. Both empty: 1;
// exactly one empty: 0.
inline double support_f1(const SupportMask& truth, const SupportMask& estimate) {
    detail::require(truth.size() == estimate.size(), "support_f1: masks differ in length");
    double tp = 0.0;
    double n_true = 0.0;
    double n_est = 0.0;
    for (std::size_t j = 0; j < truth.size(); ++j) {
        n_true += truth[j] ? 1.0 : 0.0;
        n_est += estimate[j] ? 1.0 : 0.0;
        tp += (truth[j] && estimate[j]) ? 1.0 : 0.0;
    }
    if (n_true == 0.0 && n_est == 0.0) return 1.0;
    if (n_true == 0.0 || n_est == 0.0) return 0.0;
    if (tp == 0.0) return 0.0;
    const double precision = tp / n_est;
    const double recall = tp / n_true;
    return 2.0 * precision * recall / (precision + recall);
}

struct SyntheticOptions {
    int classes = 3;
    int reps = 5;
    int length = 1024;
    int sparsity_per_class = 8;
    double snr_db = -7.7;  // +infinity: no noise
    std::uint64_t seed = 0;
};

struct SyntheticDataset {
    Matrix x;                     // n x T, class-major rows
    Labels true_labels;
    Matrix true_centroids;        // classes x T, time domain
    Matrix true_coefficients;     // classes x T, wavelet domain
    SupportMask true_support;     // pooled over classes
    double noise_sigma = 0.0;
    double snr_db = 0.0;
    std::uint64_t seed = 0;
    WaveletBasis basis;

    // n x T matrix pairing each observation with its class centroid.
    Matrix per_sample_truth() const {
        Matrix out(x.rows(), x.cols());
        for (std::size_t i = 0; i < true_labels.size(); ++i)
            out.row(static_cast<Eigen::Index>(i)) = true_centroids.row(true_labels[i]);
        return out;
    }
    Matrix per_sample_truth_wavelet() const {
        Matrix out(x.rows(), x.cols());
        for (std::size_t i = 0; i < true_labels.size(); ++i)
            out.row(static_cast<Eigen::Index>(i)) = true_coefficients.row(true_labels[i]);
        return out;
    }
};

// Class centroids with `sparsity_per_class` coefficients of magnitude in
// [1, 2] at distinct positions (disjoint across classes), observed `reps`
// times each under white noise at the requested SNR. Signal power is the
// mean over samples of ||x_i||^2 / T.
inline SyntheticDataset generate_synthetic(const WaveletBasis& basis, const SyntheticOptions& opt = {}) {
    detail::require(opt.classes >= 1 && opt.reps >= 1, "generate_synthetic: classes and reps must be >= 1");
    detail::require(opt.sparsity_per_class >= 1, "generate_synthetic: sparsity_per_class must be >= 1");
    detail::require(opt.length >= 2 && std::has_single_bit(static_cast<unsigned>(opt.length)),
                    "generate_synthetic: length must be a power of two >= 2");
    detail::require(static_cast<long>(opt.classes) * opt.sparsity_per_class <= opt.length,
                    "generate_synthetic: supports do not fit in the signal length");
    detail::require(!std::isnan(opt.snr_db) && opt.snr_db != -std::numeric_limits<double>::infinity(),
                    "generate_synthetic: snr_db must be a number or +inf");
    basis.resolved_levels(static_cast<std::size_t>(opt.length));

    std::mt19937_64 rng(opt.seed);
    SyntheticDataset ds;
    ds.seed = opt.seed;
    ds.snr_db = opt.snr_db;
    ds.basis = basis;
    const auto len = static_cast<Eigen::Index>(opt.length);

    std::vector<int> positions(static_cast<std::size_t>(opt.length));
    std::iota(positions.begin(), positions.end(), 0);
    std::shuffle(positions.begin(), positions.end(), rng);
    std::uniform_real_distribution<double> magnitude(1.0, 2.0);
    std::bernoulli_distribution sign(0.5);

    ds.true_coefficients = Matrix::Zero(opt.classes, len);
    ds.true_support.assign(static_cast<std::size_t>(opt.length), false);
    for (int c = 0; c < opt.classes; ++c) {
        for (int s = 0; s < opt.sparsity_per_class; ++s) {
            const int pos = positions[static_cast<std::size_t>(c * opt.sparsity_per_class + s)];
            const double amp = magnitude(rng);
            ds.true_coefficients(c, pos) = sign(rng) ? amp : -amp;
            ds.true_support[static_cast<std::size_t>(pos)] = true;
        }
    }
    ds.true_centroids = transform_rows(ds.true_coefficients, basis, TransformDirection::Inverse);

    const int n = opt.classes * opt.reps;
    ds.x.resize(n, len);
    ds.true_labels.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        ds.true_labels[static_cast<std::size_t>(i)] = i / opt.reps;
        ds.x.row(i) = ds.true_centroids.row(i / opt.reps);
    }
    if (std::isfinite(opt.snr_db)) {
        const double power = ds.x.squaredNorm() / static_cast<double>(ds.x.size());
        ds.noise_sigma = std::sqrt(power / std::pow(10.0, opt.snr_db / 10.0));
        std::normal_distribution<double> noise(0.0, ds.noise_sigma);
        for (Eigen::Index j = 0; j < len; ++j)
            for (Eigen::Index i = 0; i < n; ++i) ds.x(i, j) += noise(rng);
    }
    return ds;
}

struct BenchInstance {
    Matrix x;
    Labels labels;
    std::vector<int> informative;  // feature indices carrying the cluster signal
};

// Cluster means differ only on `informative` randomly chosen features, with
// coordinates drawn from U[-separation, separation]; every feature carries
// unit Gaussian noise. Cluster sizes are as equal as possible. The default
// separation keeps the clusters recoverable from a k-NN graph on all
// features despite the noise coordinates.
inline BenchInstance generate_bench_instance(int n, int t, int clusters, int informative, std::uint64_t seed,
                                             double separation = 10.0) {
    detail::require(n >= 2 && t >= 1, "bench instance: need n >= 2 and t >= 1");
    detail::require(clusters >= 1 && clusters <= n, "bench instance: clusters must be in [1, n]");
    detail::require(informative >= 0 && informative <= t, "bench instance: informative must be in [0, t]");
    std::mt19937_64 rng(seed);
    BenchInstance inst;
    std::vector<int> features(static_cast<std::size_t>(t));
    std::iota(features.begin(), features.end(), 0);
    std::shuffle(features.begin(), features.end(), rng);
    inst.informative.assign(features.begin(), features.begin() + informative);
    std::sort(inst.informative.begin(), inst.informative.end());

    Matrix means = Matrix::Zero(clusters, t);
    std::uniform_real_distribution<double> centre(-separation, separation);
    for (int c = 0; c < clusters; ++c)
        for (int f : inst.informative) means(c, f) = centre(rng);

    std::normal_distribution<double> noise(0.0, 1.0);
    inst.x.resize(n, t);
    inst.labels.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const int c = static_cast<int>(static_cast<long>(i) * clusters / n);
        inst.labels[static_cast<std::size_t>(i)] = c;
        for (int j = 0; j < t; ++j) inst.x(i, j) = means(c, j) + noise(rng);
    }
    return inst;
}

}  // namespace waveclust
