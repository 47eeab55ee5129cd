#pragma once

// Per-row wavelet shrinkage with the universal threshold
// tau = sigma * sqrt(2 ln T), sigma estimated from the finest detail band by
// the median absolute deviation (MAD / 0.6745).

#include "waveclust/error.hpp"
#include "waveclust/matrix.hpp"
#include "waveclust/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

namespace waveclust {

inline constexpr double kMadConsistency = 0.6745;

inline double soft_threshold(double value, double tau) {
    const double mag = std::abs(value) - tau;
    return mag > 0.0 ? std::copysign(mag, value) : 0.0;
}

inline double universal_threshold(double sigma, std::size_t length) {
    return sigma * std::sqrt(2.0 * std::log(static_cast<double>(length)));
}

// MAD-based noise level from a coefficient block (median of |c| / 0.6745).
inline double mad_sigma(std::span<const double> coeffs) {
    detail::require(!coeffs.empty(), "mad_sigma: empty coefficient band");
    std::vector<double> a(coeffs.size());
    std::transform(coeffs.begin(), coeffs.end(), a.begin(), [](double c) { return std::abs(c); });
    const auto mid = a.begin() + static_cast<std::ptrdiff_t>(a.size() / 2);
    std::nth_element(a.begin(), mid, a.end());
    double med = *mid;
    if (a.size() % 2 == 0) med = 0.5 * (med + *std::max_element(a.begin(), mid));
    return med / kMadConsistency;
}

struct DenoiseResult {
    Matrix denoised;      // time domain
    Matrix coefficients;  // thresholded wavelet coefficients
    Vector sigma;  // per row
    Vector tau;    // per row
};

// Thresholds wavelet coefficients row by row (detail bands only) and
// transforms them back. `fixed_sigma` replaces the MAD estimate for every row.
inline DenoiseResult denoise_coefficients(const Matrix& coeffs, const WaveletBasis& basis,
                                          std::optional<double> fixed_sigma = {}) {
    const auto len = static_cast<std::size_t>(coeffs.cols());
    const int levels = basis.resolved_levels(len);
    if (fixed_sigma) {
        detail::require(std::isfinite(*fixed_sigma) && *fixed_sigma >= 0.0, "fixed sigma must be finite and >= 0");
    }
    const auto layout = make_layout(len, len, levels);
    const auto& finest = layout.finest_detail();
    const auto detail_start = static_cast<Eigen::Index>(layout.approximation().length);

    DenoiseResult out;
    out.coefficients = coeffs;
    out.sigma.resize(coeffs.rows());
    out.tau.resize(coeffs.rows());
    std::vector<double> band(finest.length);
    for (Eigen::Index i = 0; i < coeffs.rows(); ++i) {
        for (std::size_t j = 0; j < finest.length; ++j) band[j] = coeffs(i, static_cast<Eigen::Index>(finest.start + j));
        const double sigma = fixed_sigma ? *fixed_sigma : mad_sigma(band);
        const double tau = universal_threshold(sigma, len);
        for (Eigen::Index j = detail_start; j < coeffs.cols(); ++j)
            out.coefficients(i, j) = soft_threshold(coeffs(i, j), tau);
        out.sigma[i] = sigma;
        out.tau[i] = tau;
    }
    out.denoised = transform_rows(out.coefficients, basis, TransformDirection::Inverse);
    return out;
}

// Time-domain rows of power-of-two length.
inline DenoiseResult universal_soft_denoise(const Matrix& x, const WaveletBasis& basis,
                                            std::optional<double> fixed_sigma = {}) {
    basis.resolved_levels(static_cast<std::size_t>(x.cols()));
    return denoise_coefficients(transform_rows(x, basis, TransformDirection::Forward), basis, fixed_sigma);
}

}  // namespace waveclust
