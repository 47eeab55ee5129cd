#include "waveclust/wavelet.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cmath>

namespace waveclust {
namespace {

constexpr std::array kFamilies = {WaveletFamily::Haar, WaveletFamily::Db4, WaveletFamily::Db8};

// Psi assembled as a product of per-level filter-bank matrices, built straight
// from the filter taps. Independent of the in-place pyramid code.
Matrix filter_bank_matrix(std::size_t n, const WaveletBasis& basis) {
    const auto h = basis.low_pass();
    const auto g = basis.high_pass();
    const int levels = basis.resolved_levels(n);
    Matrix analysis = Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    std::size_t len = n;
    for (int l = 0; l < levels; ++l, len /= 2) {
        Matrix stage = Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        stage.topLeftCorner(static_cast<Eigen::Index>(len), static_cast<Eigen::Index>(len)).setZero();
        for (std::size_t k = 0; k < len / 2; ++k) {
            for (std::size_t t = 0; t < h.size(); ++t) {
                const auto col = static_cast<Eigen::Index>((2 * k + t) % len);
                stage(static_cast<Eigen::Index>(k), col) += h[t];
                stage(static_cast<Eigen::Index>(len / 2 + k), col) += g[t];
            }
        }
        analysis = stage * analysis;
    }
    // c = A x for column x, so c^T = x^T A^T: Psi = A^T.
    return analysis.transpose();
}

TEST(WaveletFilters, LowPassSumsToSqrtTwoAndIsOrthonormal) {
    for (auto family : kFamilies) {
        const WaveletBasis basis{family, 0};
        const auto h = basis.low_pass();
        double sum = 0.0;
        for (double v : h) sum += v;
        EXPECT_NEAR(sum, std::sqrt(2.0), 1e-12) << family_name(family);
        for (std::size_t m = 0; 2 * m < h.size(); ++m) {
            double dot = 0.0;
            for (std::size_t k = 0; k + 2 * m < h.size(); ++k) dot += h[k] * h[k + 2 * m];
            EXPECT_NEAR(dot, m == 0 ? 1.0 : 0.0, 1e-12) << family_name(family) << " shift " << m;
        }
    }
}

TEST(WaveletFilters, HighPassIsQuadratureMirror) {
    const WaveletBasis basis{WaveletFamily::Db4, 0};
    const auto h = basis.low_pass();
    const auto g = basis.high_pass();
    ASSERT_EQ(g.size(), 8u);
    for (std::size_t k = 0; k < g.size(); ++k) {
        EXPECT_EQ(g[k], (k % 2 == 0 ? 1.0 : -1.0) * h[7 - k]);
    }
    EXPECT_EQ((WaveletBasis{WaveletFamily::Db8, 0}.taps()), 16u);
    EXPECT_EQ((WaveletBasis{WaveletFamily::Haar, 0}.taps()), 2u);
}

TEST(WaveletForward, ConstantSignalHasOnlyApproximationEnergy) {
    const Vector x = Vector::Ones(4);
    const Vector c = dwt_forward(x, {WaveletFamily::Haar, 2});
    EXPECT_NEAR(c[0], 2.0, 1e-15);
    EXPECT_NEAR(c.tail(3).norm(), 0.0, 1e-15);
}

TEST(WaveletForward, HaarMatchesHandBuiltBasis) {
    // Orthonormal Haar basis of R^4 in approximation-first, coarse-to-fine order.
    Matrix basis(4, 4);
    basis << 0.5, 0.5, 0.5, 0.5,
             0.5, 0.5, -0.5, -0.5,
             M_SQRT1_2, -M_SQRT1_2, 0, 0,
             0, 0, M_SQRT1_2, -M_SQRT1_2;
    Vector x(4);
    x << 1, -1, 0, 0;
    const Vector expected = basis * x;
    const Vector c = dwt_forward(x, {WaveletFamily::Haar, 2});
    EXPECT_NEAR((c - expected).norm(), 0.0, 1e-15);
    EXPECT_NEAR(c[2], std::sqrt(2.0), 1e-15);

    std::mt19937_64 rng(7);
    const Vector y = testing::random_vector(4, rng);
    EXPECT_NEAR((dwt_forward(y, {WaveletFamily::Haar, 2}) - basis * y).norm(), 0.0, 1e-14);
}

TEST(WaveletInverse, Examples) {
    Vector c(4);
    c << 2, 0, 0, 0;
    EXPECT_NEAR((dwt_inverse(c, {WaveletFamily::Haar, 2}) - Vector::Ones(4)).norm(), 0.0, 1e-15);
    c << 0, 0, std::sqrt(2.0), 0;
    Vector expected(4);
    expected << 1, -1, 0, 0;
    EXPECT_NEAR((dwt_inverse(c, {WaveletFamily::Haar, 2}) - expected).norm(), 0.0, 1e-15);
    EXPECT_EQ(dwt_inverse(Vector::Zero(16), {WaveletFamily::Db8, 0}), Vector::Zero(16));
}

TEST(WaveletForward, Db4RoundTrip) {
    std::mt19937_64 rng(1);
    const Vector x = testing::random_vector(32, rng);
    const WaveletBasis basis{WaveletFamily::Db4, 0};
    EXPECT_LT((dwt_inverse(dwt_forward(x, basis), basis) - x).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(WaveletForward, RejectsBadShapes) {
    EXPECT_THROW(dwt_forward(Vector::Ones(6), {WaveletFamily::Haar, 0}), InvalidInput);
    EXPECT_THROW(dwt_forward(Vector::Ones(8), {WaveletFamily::Haar, 4}), InvalidInput);
    EXPECT_THROW(dwt_inverse(Vector::Ones(1), {WaveletFamily::Haar, 0}), InvalidInput);
    EXPECT_THROW(dwt_forward(Vector::Ones(8), {WaveletFamily::Haar, -1}), InvalidInput);
    EXPECT_THROW(parse_family("sym4"), InvalidInput);
}

TEST(WaveletMatrix, HaarButterfly) {
    const Matrix psi = dwt_matrix(2, {WaveletFamily::Haar, 0});
    Matrix expected(2, 2);
    expected << M_SQRT1_2, M_SQRT1_2, M_SQRT1_2, -M_SQRT1_2;
    EXPECT_LT((psi - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(WaveletMatrix, SizeGuard) {
    EXPECT_THROW(dwt_matrix(8192, {WaveletFamily::Haar, 0}), InvalidInput);
}

TEST(WaveletMatrix, OrthogonalAndMatchesFilterBankOracle) {
    for (auto family : kFamilies) {
        for (std::size_t n : {2u, 4u, 8u, 16u, 32u, 64u}) {
            const WaveletBasis basis{family, 0};
            const Matrix psi = dwt_matrix(n, basis);
            const auto dim = static_cast<Eigen::Index>(n);
            EXPECT_LT((psi * psi.transpose() - Matrix::Identity(dim, dim)).cwiseAbs().maxCoeff(), 1e-10)
                << family_name(family) << " n=" << n;
            EXPECT_LT((psi - filter_bank_matrix(n, basis)).cwiseAbs().maxCoeff(), 1e-12)
                << family_name(family) << " n=" << n;
            for (Eigen::Index j = 0; j < dim; ++j) {
                const Vector e = Vector::Unit(dim, j);
                EXPECT_EQ(psi.transpose().col(j), dwt_forward(e, basis));
            }
        }
    }
}

TEST(WaveletRows, TransformRows) {
    Matrix x(2, 4);
    x.row(0).setConstant(3.0);
    x.row(1).setConstant(-0.5);
    const Matrix c = transform_rows(x, {WaveletFamily::Haar, 0}, TransformDirection::Forward);
    EXPECT_NEAR(c(0, 0), 6.0, 1e-14);
    EXPECT_NEAR(c(1, 0), -1.0, 1e-14);
    EXPECT_NEAR(c.rightCols(3).norm(), 0.0, 1e-14);

    std::mt19937_64 rng(3);
    for (auto family : kFamilies) {
        const WaveletBasis basis{family, 0};
        const Matrix y = testing::random_matrix(3, 16, rng);
        const Matrix fwd = transform_rows(y, basis, TransformDirection::Forward);
        EXPECT_LT((fwd - y * filter_bank_matrix(16, basis)).cwiseAbs().maxCoeff(), 1e-10);
        const Matrix back = transform_rows(fwd, basis, TransformDirection::Inverse);
        EXPECT_LT((back - y).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(WaveletPadding, Examples) {
    const WaveletBasis basis{WaveletFamily::Db4, 0};
    auto padded = pad_signal(Vector::Ones(2394), basis);
    EXPECT_EQ(padded.values.size(), 4096);
    EXPECT_EQ(padded.layout.original_length, 2394u);
    EXPECT_EQ(padded.layout.padded_length, 4096u);
    EXPECT_EQ(padded.layout.levels, 12);

    padded = pad_signal(Vector::Ones(1024), basis);
    EXPECT_EQ(padded.values.size(), 1024);

    Vector x(5);
    x << 1, 2, 3, 4, 5;
    padded = pad_signal(x, basis);
    Vector expected(8);
    expected << 1, 2, 3, 4, 5, 0, 0, 0;
    EXPECT_EQ(padded.values, expected);
    padded = pad_signal(x, basis, PadMode::Edge);
    expected << 1, 2, 3, 4, 5, 5, 5, 5;
    EXPECT_EQ(padded.values, expected);

    EXPECT_THROW(pad_signal(Vector::Ones(1), basis), InvalidInput);
}

TEST(WaveletPadding, RowsRoundTripThroughTruncate) {
    std::mt19937_64 rng(5);
    const Matrix x = testing::random_matrix(3, 37, rng);
    const WaveletBasis basis{WaveletFamily::Db8, 0};
    const auto padded = pad_rows(x, basis);
    EXPECT_EQ(padded.values.cols(), 64);
    const Matrix c = transform_rows(padded.values, basis, TransformDirection::Forward);
    const Matrix back = truncate_rows(transform_rows(c, basis, TransformDirection::Inverse), padded.layout);
    EXPECT_LT((back - x).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(WaveletLayout, BandsAreContiguousCoarsestFirst) {
    const auto layout = make_layout(1000, 1024, 10);
    ASSERT_EQ(layout.bands.size(), 11u);
    EXPECT_EQ(layout.bands.front().name, "a10");
    EXPECT_EQ(layout.bands[1].name, "d10");
    EXPECT_EQ(layout.finest_detail().name, "d1");
    EXPECT_EQ(layout.finest_detail().length, 512u);
    std::size_t offset = 0;
    for (const auto& band : layout.bands) {
        EXPECT_EQ(band.start, offset);
        offset += band.length;
    }
    EXPECT_EQ(offset, 1024u);
}

// Property checks over random signals.

TEST(WaveletProperties, ParsevalAndPerfectReconstruction) {
    std::mt19937_64 rng(11);
    for (auto family : kFamilies) {
        for (std::size_t n : {8u, 16u, 64u, 1024u}) {
            const int max_levels = detail::log2_exact(n);
            for (int levels = 1; levels <= max_levels; ++levels) {
                const WaveletBasis basis{family, levels};
                const Vector x = testing::random_vector(static_cast<Eigen::Index>(n), rng);
                const Vector c = dwt_forward(x, basis);
                EXPECT_NEAR(c.norm(), x.norm(), 1e-10);
                EXPECT_LT((dwt_inverse(c, basis) - x).cwiseAbs().maxCoeff(), 1e-10);
                EXPECT_LT((dwt_forward(dwt_inverse(x, basis), basis) - x).cwiseAbs().maxCoeff(), 1e-10);
            }
        }
    }
}

TEST(WaveletProperties, BasisFunctionIsOneSparse) {
    std::mt19937_64 rng(13);
    std::uniform_int_distribution<int> pick(0, 63);
    for (auto family : kFamilies) {
        const WaveletBasis basis{family, 0};
        for (int trial = 0; trial < 5; ++trial) {
            const int k = pick(rng);
            const Vector atom = 3.5 * dwt_inverse(Vector::Unit(64, k), basis);
            const Vector c = dwt_forward(atom, basis);
            EXPECT_NEAR(c[k], 3.5, 1e-12);
            int big = 0;
            for (Eigen::Index j = 0; j < c.size(); ++j) big += std::abs(c[j]) > 1e-12 ? 1 : 0;
            EXPECT_EQ(big, 1);
        }
    }
}

}  // namespace
}  // namespace waveclust
