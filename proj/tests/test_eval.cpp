#include "waveclust/eval.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

namespace waveclust {
namespace {

// ARI from the 2x2 pair-confusion counts, computed by looping over all pairs.
double ari_by_pairs(const Labels& a, const Labels& b) {
    double both = 0, only_a = 0, only_b = 0, neither = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = i + 1; j < a.size(); ++j) {
            const bool sa = a[i] == a[j];
            const bool sb = b[i] == b[j];
            if (sa && sb) both += 1;
            else if (sa) only_a += 1;
            else if (sb) only_b += 1;
            else neither += 1;
        }
    }
    const double num = 2.0 * (both * neither - only_a * only_b);
    const double den = (both + only_a) * (only_a + neither) + (both + only_b) * (only_b + neither);
    return den == 0.0 ? 1.0 : num / den;
}

Labels random_labels(std::size_t n, int k, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> pick(0, k - 1);
    Labels out(n);
    for (auto& l : out) l = pick(rng);
    return out;
}

TEST(Ari, Examples) {
    const Labels a{0, 0, 1, 1, 2, 2};
    EXPECT_DOUBLE_EQ(adjusted_rand_index(a, a), 1.0);
    EXPECT_DOUBLE_EQ(adjusted_rand_index(a, {7, 7, 3, 3, 5, 5}), 1.0);
    EXPECT_NEAR(adjusted_rand_index({0, 0, 1, 1}, {0, 1, 1, 1}), 0.0, 1e-15);
}

TEST(Ari, RejectsBadInput) {
    EXPECT_THROW(adjusted_rand_index({0, 1}, {0, 1, 2}), InvalidInput);
    EXPECT_THROW(adjusted_rand_index({0}, {0}), InvalidInput);
}

TEST(Ari, MatchesPairCountingOracle) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + trial % 40;
        const Labels a = random_labels(n, 1 + trial % 5, rng);
        const Labels b = random_labels(n, 1 + (trial / 5) % 5, rng);
        EXPECT_NEAR(adjusted_rand_index(a, b), ari_by_pairs(a, b), 1e-12);
    }
}

TEST(Ari, Symmetric) {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 200; ++trial) {
        const Labels a = random_labels(30, 4, rng);
        const Labels b = random_labels(30, 3, rng);
        EXPECT_DOUBLE_EQ(adjusted_rand_index(a, b), adjusted_rand_index(b, a));
    }
}

TEST(Ari, RandomLabelingsAverageNearZero) {
    std::mt19937_64 rng(13);
    double total = 0.0;
    const int draws = 10000;
    for (int d = 0; d < draws; ++d) total += adjusted_rand_index(random_labels(100, 3, rng), random_labels(100, 3, rng));
    EXPECT_LT(std::abs(total / draws), 0.02);
}

TEST(Correlation, Examples) {
    std::mt19937_64 rng(14);
    const Matrix t = testing::random_matrix(6, 10, rng);
    EXPECT_NEAR(centroid_correlation(t, t), 1.0, 1e-14);
    EXPECT_NEAR(centroid_correlation(t, -t), -1.0, 1e-14);
    EXPECT_NEAR(centroid_correlation(t, (t.array() + 3.5).matrix()), 1.0, 1e-14);
}

TEST(Correlation, RejectsBadInput) {
    EXPECT_THROW(centroid_correlation(Matrix::Ones(3, 3), Matrix::Ones(3, 3)), InvalidInput);
    EXPECT_THROW(centroid_correlation(Matrix::Ones(3, 3), Matrix::Ones(3, 2)), InvalidInput);
}

TEST(Compression, Examples) {
    EXPECT_DOUBLE_EQ(compression(Matrix::Zero(4, 5)), 1.0);
    std::mt19937_64 rng(15);
    EXPECT_DOUBLE_EQ(compression(testing::random_matrix(4, 5, rng)), 0.0);
    Matrix m = Matrix::Zero(3, 4);
    m(0, 1) = 1.0;
    m(1, 3) = -2.0;
    m(2, 0) = 0.5;
    EXPECT_DOUBLE_EQ(compression(m), 0.75);
}

TEST(Compression, ComplementsNonzeroFraction) {
    std::mt19937_64 rng(16);
    std::bernoulli_distribution keep(0.3);
    for (int trial = 0; trial < 50; ++trial) {
        Matrix m = testing::random_matrix(7, 9, rng);
        for (Eigen::Index i = 0; i < m.size(); ++i)
            if (!keep(rng)) m.data()[i] = 0.0;
        const double nonzero = static_cast<double>((m.array() != 0.0).count()) / static_cast<double>(m.size());
        EXPECT_EQ(compression(m) + nonzero, 1.0);
    }
}

SupportMask mask_of(std::size_t n, std::initializer_list<std::size_t> on) {
    SupportMask m(n, false);
    for (auto i : on) m[i] = true;
    return m;
}

TEST(SupportF1, Examples) {
    const auto a = mask_of(8, {1, 2, 3, 4});
    EXPECT_DOUBLE_EQ(support_f1(a, a), 1.0);
    EXPECT_DOUBLE_EQ(support_f1(a, mask_of(8, {0, 5})), 0.0);
    EXPECT_DOUBLE_EQ(support_f1(a, mask_of(8, {3, 4, 5, 6})), 0.5);
    EXPECT_DOUBLE_EQ(support_f1(mask_of(8, {}), mask_of(8, {})), 1.0);
    EXPECT_DOUBLE_EQ(support_f1(a, mask_of(8, {})), 0.0);
    EXPECT_DOUBLE_EQ(support_f1(mask_of(8, {}), a), 0.0);
    EXPECT_THROW(support_f1(a, mask_of(7, {})), InvalidInput);
}

TEST(ColumnSupport, MarksNonzeroColumns) {
    Matrix m = Matrix::Zero(2, 4);
    m(1, 2) = 1e-300;
    EXPECT_EQ(column_support(m), mask_of(4, {2}));
}

const WaveletBasis kDb4{WaveletFamily::Db4, 0};

TEST(Synthetic, DefaultShapes) {
    const auto ds = generate_synthetic(kDb4);
    EXPECT_EQ(ds.x.rows(), 15);
    EXPECT_EQ(ds.x.cols(), 1024);
    EXPECT_EQ(ds.true_labels.size(), 15u);
    EXPECT_EQ(ds.true_labels.front(), 0);
    EXPECT_EQ(ds.true_labels.back(), 2);
    EXPECT_EQ(ds.snr_db, -7.7);
    int pooled = 0;
    for (bool b : ds.true_support) pooled += b;
    EXPECT_EQ(pooled, 24);
}

TEST(Synthetic, NoiseVarianceFollowsSnr) {
    const auto ds = generate_synthetic(kDb4);
    const double power = ds.per_sample_truth().squaredNorm() / static_cast<double>(ds.x.size());
    EXPECT_NEAR(ds.noise_sigma * ds.noise_sigma / power, 5.888, 1e-3);
}

TEST(Synthetic, NoiselessSignalsAreExactlySparse) {
    SyntheticOptions opt;
    opt.snr_db = std::numeric_limits<double>::infinity();
    opt.seed = 3;
    for (auto family : {WaveletFamily::Haar, WaveletFamily::Db4, WaveletFamily::Db8}) {
        const WaveletBasis basis{family, 0};
        const auto ds = generate_synthetic(basis, opt);
        EXPECT_EQ(ds.noise_sigma, 0.0);
        const Matrix coeffs = transform_rows(ds.x, basis, TransformDirection::Forward);
        for (Eigen::Index i = 0; i < coeffs.rows(); ++i) {
            // Round-off from the inverse/forward pair stays far below the
            // unit amplitude floor.
            EXPECT_EQ((coeffs.row(i).array().abs() > 1e-9).count(), opt.sparsity_per_class);
        }
        for (Eigen::Index c = 0; c < ds.true_coefficients.rows(); ++c) {
            const Eigen::ArrayXd nz = ds.true_coefficients.row(c).transpose().array();
            EXPECT_EQ((nz != 0.0).count(), opt.sparsity_per_class);
            EXPECT_GE(nz.abs().maxCoeff(), 1.0);
            EXPECT_LE(nz.abs().maxCoeff(), 2.0);
        }
    }
}

TEST(Synthetic, ClassSupportsAreDisjoint) {
    const auto ds = generate_synthetic(kDb4, {.seed = 5});
    const auto& c = ds.true_coefficients;
    for (Eigen::Index j = 0; j < c.cols(); ++j) EXPECT_LE((c.col(j).array() != 0.0).count(), 1);
}

TEST(Synthetic, DeterministicPerSeed) {
    const auto a = generate_synthetic(kDb4, {.seed = 9});
    const auto b = generate_synthetic(kDb4, {.seed = 9});
    const auto c = generate_synthetic(kDb4, {.seed = 10});
    EXPECT_EQ(a.x, b.x);
    EXPECT_EQ(a.true_centroids, b.true_centroids);
    EXPECT_NE(a.true_centroids, c.true_centroids);
}

TEST(Synthetic, RealizedSnrWithinHalfDecibel) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto ds = generate_synthetic(kDb4, {.seed = seed});
        const Matrix truth = ds.per_sample_truth();
        const double signal = truth.squaredNorm();
        const double noise = (ds.x - truth).squaredNorm();
        EXPECT_NEAR(10.0 * std::log10(signal / noise), -7.7, 0.5) << "seed " << seed;
    }
}

TEST(Synthetic, RejectsBadSizes) {
    EXPECT_THROW(generate_synthetic(kDb4, {.length = 1000}), InvalidInput);
    EXPECT_THROW(generate_synthetic(kDb4, {.sparsity_per_class = 0}), InvalidInput);
    EXPECT_THROW(generate_synthetic(kDb4, {.classes = 3, .length = 16, .sparsity_per_class = 6}), InvalidInput);
}

TEST(BenchInstance, MeansDifferOnlyOnInformativeFeatures) {
    const auto inst = generate_bench_instance(240, 1000, 3, 6, 0);
    EXPECT_EQ(inst.x.rows(), 240);
    EXPECT_EQ(inst.x.cols(), 1000);
    ASSERT_EQ(inst.informative.size(), 6u);
    EXPECT_EQ(count_if(inst.labels.begin(), inst.labels.end(), [](int l) { return l == 1; }), 80);
    // Between-cluster spread of the per-cluster sample means: only the
    // informative features should stand out above the noise floor.
    Matrix means = Matrix::Zero(3, 1000);
    for (Eigen::Index i = 0; i < 240; ++i) means.row(inst.labels[static_cast<std::size_t>(i)]) += inst.x.row(i) / 80.0;
    const RowVector spread = (means.rowwise() - means.colwise().mean()).colwise().norm();
    std::vector<bool> informative(1000, false);
    for (int f : inst.informative) informative[static_cast<std::size_t>(f)] = true;
    int loud = 0;
    for (Eigen::Index j = 0; j < 1000; ++j) {
        if (spread[j] > 0.6) {
            ++loud;
            EXPECT_TRUE(informative[static_cast<std::size_t>(j)]) << "feature " << j;
        }
    }
    EXPECT_GE(loud, 5);
}

}  // namespace
}  // namespace waveclust
