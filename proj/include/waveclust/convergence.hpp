#pragma once

#include "waveclust/error.hpp"
#include "waveclust/problem.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace waveclust {

struct LinearRateFit {
    double slope = 0.0;      // d log(residual) / d iteration
    double rate = 1.0;       // exp(slope), per-iteration contraction factor
    double r_squared = 0.0;
    bool is_linear = false;
};

inline constexpr std::size_t kMinLinearRateSamples = 20;

// Least-squares fit of log(residual) against iteration over residuals after
// `burn_in`. Linear (geometric) convergence when R^2 >= 0.98 and the slope
// is negative.
inline LinearRateFit check_linear_rate(std::span<const double> residuals, std::size_t burn_in = 0) {
    if (burn_in >= residuals.size() || residuals.size() - burn_in < kMinLinearRateSamples) {
        throw InvalidInput("check_linear_rate: need at least " + std::to_string(kMinLinearRateSamples) +
                           " residuals after burn-in");
    }
    const auto tail = residuals.subspan(burn_in);
    const auto count = static_cast<double>(tail.size());
    double mean_x = 0.0;
    double mean_y = 0.0;
    std::vector<double> ys(tail.size());
    for (std::size_t k = 0; k < tail.size(); ++k) {
        const double r = std::max(tail[k], std::numeric_limits<double>::min());
        ys[k] = std::log(r);
        mean_x += static_cast<double>(k);
        mean_y += ys[k];
    }
    mean_x /= count;
    mean_y /= count;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t k = 0; k < tail.size(); ++k) {
        const double dx = static_cast<double>(k) - mean_x;
        const double dy = ys[k] - mean_y;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    LinearRateFit fit;
    fit.slope = sxy / sxx;
    fit.rate = std::exp(fit.slope);
    fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 0.0;
    fit.is_linear = fit.r_squared >= 0.98 && fit.slope < 0.0;
    return fit;
}

// sqrt(primal^2 + dual^2) per iteration.
inline std::vector<double> combined_residuals(const std::vector<IterationRecord>& trace) {
    std::vector<double> out;
    out.reserve(trace.size());
    for (const auto& rec : trace) out.push_back(std::hypot(rec.primal_residual, rec.dual_residual));
    return out;
}

}  // namespace waveclust
