#pragma once

// Orthonormal periodic discrete wavelet transform (pyramid filter bank).
//
// The transform acts on row vectors: c = x * Psi, with Psi orthogonal.
// Coefficients are laid out approximation first, then detail bands from
// coarse to fine:
//
//     [ a_L | d_L | d_{L-1} | ... | d_1 ]
//
// where band d_l has length T / 2^l and a_L has length T / 2^L.
//
// Family naming follows the vanishing-moment convention: db4 is the 8-tap
// Daubechies filter and db8 the 16-tap one.

#include "waveclust/error.hpp"
#include "waveclust/matrix.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace waveclust {

enum class WaveletFamily { Haar, Db4, Db8 };

namespace detail {

inline constexpr std::array<double, 2> kHaarLowPass = {
    0.70710678118654752440, 0.70710678118654752440};

inline constexpr std::array<double, 8> kDb4LowPass = {
    0.23037781330889650086,  0.71484657055291564709,  0.63088076792985890788,
    -0.027983769416859854211, -0.18703481171909308408, 0.030841381835560763627,
    0.032883011666885199735, -0.010597401785069032105};

inline constexpr std::array<double, 16> kDb8LowPass = {
    0.054415842243104009955,   0.31287159091429997066,
    0.67563073629728980681,    0.58535468365420671277,
    -0.015829105256349305667,  -0.28401554296154692652,
    0.00047248457391328277036, 0.12874742662047845886,
    -0.01736930100180754617,   -0.044088253930794751507,
    0.013981027917398281649,   0.0087460940474057767164,
    -0.0048703529934515743104, -0.0003917403733769470463,
    0.00067544940645056936637, -0.00011747678412476953373};

inline bool is_power_of_two(std::size_t n) { return n >= 1 && std::has_single_bit(n); }

inline int log2_exact(std::size_t n) { return std::bit_width(n) - 1; }

}  // namespace detail

inline std::string_view family_name(WaveletFamily f) {
    switch (f) {
        case WaveletFamily::Haar: return "haar";
        case WaveletFamily::Db4: return "db4";
        case WaveletFamily::Db8: return "db8";
    }
    return "unknown";
}

inline WaveletFamily parse_family(std::string_view name) {
    if (name == "haar" || name == "db1") return WaveletFamily::Haar;
    if (name == "db4") return WaveletFamily::Db4;
    if (name == "db8") return WaveletFamily::Db8;
    throw InvalidInput("unknown wavelet basis '" + std::string(name) + "' (expected haar, db4 or db8)");
}

// A filter family plus decomposition depth. levels == 0 selects the maximal
// depth log2(T) for whatever signal length the basis is applied to.
struct WaveletBasis {
    WaveletFamily family = WaveletFamily::Haar;
    int levels = 0;

    std::span<const double> low_pass() const {
        switch (family) {
            case WaveletFamily::Haar: return detail::kHaarLowPass;
            case WaveletFamily::Db4: return detail::kDb4LowPass;
            case WaveletFamily::Db8: return detail::kDb8LowPass;
        }
        return {};
    }

    // Quadrature mirror: g_k = (-1)^k h_{L-1-k}.
    std::vector<double> high_pass() const {
        const auto h = low_pass();
        const std::size_t len = h.size();
        std::vector<double> g(len);
        for (std::size_t k = 0; k < len; ++k) {
            g[k] = (k % 2 == 0 ? 1.0 : -1.0) * h[len - 1 - k];
        }
        return g;
    }

    std::size_t taps() const { return low_pass().size(); }

    // Depth actually used for a signal of length n (validated).
    int resolved_levels(std::size_t n) const {
        if (!detail::is_power_of_two(n) || n < 2) {
            throw InvalidInput("wavelet transform needs a power-of-two length >= 2, got " +
                               std::to_string(n));
        }
        const int max_levels = detail::log2_exact(n);
        if (levels < 0) throw InvalidInput("wavelet levels must be non-negative");
        if (levels > max_levels) {
            throw InvalidInput("wavelet levels " + std::to_string(levels) + " exceed log2(" +
                               std::to_string(n) + ") = " + std::to_string(max_levels));
        }
        return levels == 0 ? max_levels : levels;
    }
};

struct CoefficientBand {
    std::string name;
    std::size_t start = 0;
    std::size_t length = 0;
};

struct CoefficientLayout {
    std::size_t original_length = 0;
    std::size_t padded_length = 0;
    int levels = 0;
    std::vector<CoefficientBand> bands;

    // Band holding the finest details (d1).
    const CoefficientBand& finest_detail() const { return bands.back(); }
    // Approximation band (a_L).
    const CoefficientBand& approximation() const { return bands.front(); }
};

inline CoefficientLayout make_layout(std::size_t original_length, std::size_t padded_length,
                                     int levels) {
    CoefficientLayout layout;
    layout.original_length = original_length;
    layout.padded_length = padded_length;
    layout.levels = levels;
    std::size_t coarse = padded_length >> levels;
    layout.bands.push_back({"a" + std::to_string(levels), 0, coarse});
    std::size_t offset = coarse;
    for (int l = levels; l >= 1; --l) {
        const std::size_t len = padded_length >> l;
        layout.bands.push_back({"d" + std::to_string(l), offset, len});
        offset += len;
    }
    return layout;
}

namespace detail {

// One analysis step on the first n entries of `data`, periodic boundary.
inline void analysis_step(std::span<double> data, std::size_t n, std::span<const double> h,
                          std::span<const double> g, std::vector<double>& scratch) {
    const std::size_t half = n / 2;
    scratch.assign(n, 0.0);
    for (std::size_t k = 0; k < half; ++k) {
        double a = 0.0;
        double d = 0.0;
        for (std::size_t l = 0; l < h.size(); ++l) {
            const double x = data[(2 * k + l) % n];
            a += h[l] * x;
            d += g[l] * x;
        }
        scratch[k] = a;
        scratch[half + k] = d;
    }
    std::copy(scratch.begin(), scratch.end(), data.begin());
}

// Adjoint (= inverse) of analysis_step.
inline void synthesis_step(std::span<double> data, std::size_t n, std::span<const double> h,
                           std::span<const double> g, std::vector<double>& scratch) {
    const std::size_t half = n / 2;
    scratch.assign(n, 0.0);
    for (std::size_t k = 0; k < half; ++k) {
        const double a = data[k];
        const double d = data[half + k];
        for (std::size_t l = 0; l < h.size(); ++l) {
            scratch[(2 * k + l) % n] += h[l] * a + g[l] * d;
        }
    }
    std::copy(scratch.begin(), scratch.end(), data.begin());
}

inline void forward_inplace(std::span<double> data, const WaveletBasis& basis,
                            std::vector<double>& scratch) {
    const int levels = basis.resolved_levels(data.size());
    const auto h = basis.low_pass();
    const auto g = basis.high_pass();
    std::size_t n = data.size();
    for (int l = 0; l < levels; ++l, n /= 2) analysis_step(data, n, h, g, scratch);
}

inline void inverse_inplace(std::span<double> data, const WaveletBasis& basis,
                            std::vector<double>& scratch) {
    const int levels = basis.resolved_levels(data.size());
    const auto h = basis.low_pass();
    const auto g = basis.high_pass();
    std::size_t n = data.size() >> (levels - 1);
    for (int l = 0; l < levels; ++l, n *= 2) synthesis_step(data, n, h, g, scratch);
}

}  // namespace detail

inline Vector dwt_forward(const Eigen::Ref<const Vector>& signal, const WaveletBasis& basis) {
    Vector out = signal;
    std::vector<double> scratch;
    detail::forward_inplace(std::span<double>(out.data(), out.size()), basis, scratch);
    return out;
}

inline Vector dwt_inverse(const Eigen::Ref<const Vector>& coeffs, const WaveletBasis& basis) {
    Vector out = coeffs;
    std::vector<double> scratch;
    detail::inverse_inplace(std::span<double>(out.data(), out.size()), basis, scratch);
    return out;
}

inline constexpr std::size_t kMaxExplicitTransformSize = 4096;

// Explicit Psi with dwt_forward(x) == x * Psi. Intended for tests and small
// problems; row i of Psi is the transform of the i-th standard basis vector.
inline Matrix dwt_matrix(std::size_t n, const WaveletBasis& basis) {
    if (n > kMaxExplicitTransformSize) {
        throw InvalidInput("dwt_matrix size " + std::to_string(n) + " exceeds " +
                           std::to_string(kMaxExplicitTransformSize));
    }
    basis.resolved_levels(n);
    Matrix psi(n, n);
    Vector e = Vector::Zero(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        e.setZero();
        e[static_cast<Eigen::Index>(i)] = 1.0;
        psi.row(static_cast<Eigen::Index>(i)) = dwt_forward(e, basis).transpose();
    }
    return psi;
}

enum class TransformDirection { Forward, Inverse };

// Applies the transform independently to every row of X.
inline Matrix transform_rows(const Matrix& x, const WaveletBasis& basis,
                             TransformDirection direction) {
    Matrix out(x.rows(), x.cols());
    std::vector<double> row(static_cast<std::size_t>(x.cols()));
    std::vector<double> scratch;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) row[static_cast<std::size_t>(j)] = x(i, j);
        if (direction == TransformDirection::Forward) {
            detail::forward_inplace(row, basis, scratch);
        } else {
            detail::inverse_inplace(row, basis, scratch);
        }
        for (Eigen::Index j = 0; j < x.cols(); ++j) out(i, j) = row[static_cast<std::size_t>(j)];
    }
    return out;
}

enum class PadMode { Zero, Edge };

inline std::size_t next_power_of_two(std::size_t n) { return std::bit_ceil(n); }

struct PaddedSignal {
    Vector values;
    CoefficientLayout layout;
};

inline PaddedSignal pad_signal(const Eigen::Ref<const Vector>& x, const WaveletBasis& basis,
                               PadMode mode = PadMode::Zero) {
    const auto len = static_cast<std::size_t>(x.size());
    if (len < 2) throw InvalidInput("signal length must be at least 2");
    const std::size_t padded = next_power_of_two(len);
    PaddedSignal out;
    out.values = Vector::Zero(static_cast<Eigen::Index>(padded));
    out.values.head(x.size()) = x;
    if (mode == PadMode::Edge) {
        out.values.tail(static_cast<Eigen::Index>(padded - len)).setConstant(x[x.size() - 1]);
    }
    out.layout = make_layout(len, padded, basis.resolved_levels(padded));
    return out;
}

struct PaddedMatrix {
    Matrix values;
    CoefficientLayout layout;
};

// Row-wise pad_signal for an n x T matrix.
inline PaddedMatrix pad_rows(const Matrix& x, const WaveletBasis& basis,
                             PadMode mode = PadMode::Zero) {
    const auto len = static_cast<std::size_t>(x.cols());
    if (len < 2) throw InvalidInput("signal length must be at least 2");
    const std::size_t padded = next_power_of_two(len);
    PaddedMatrix out;
    out.values = Matrix::Zero(x.rows(), static_cast<Eigen::Index>(padded));
    out.values.leftCols(x.cols()) = x;
    if (mode == PadMode::Edge) {
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            out.values.row(i).tail(static_cast<Eigen::Index>(padded - len))
                .setConstant(x(i, x.cols() - 1));
        }
    }
    out.layout = make_layout(len, padded, basis.resolved_levels(padded));
    return out;
}

// Drops the padding columns recorded in `layout`.
inline Matrix truncate_rows(const Matrix& x, const CoefficientLayout& layout) {
    detail::require(static_cast<std::size_t>(x.cols()) == layout.padded_length,
                    "truncate_rows: column count does not match padded length");
    return x.leftCols(static_cast<Eigen::Index>(layout.original_length));
}

}  // namespace waveclust
