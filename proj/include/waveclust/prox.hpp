#pragma once

// Group soft-thresholding and dual-ball projections. Row variants act on the
// fusion block (one group per edge), column variants on the sparsity block
// (one group per coefficient). Thresholds are tau_g = scale * weight_g.
//
// Thresholded groups are written as exact zeros; cluster extraction and
// support masks rely on that.

#include "waveclust/error.hpp"
#include "waveclust/matrix.hpp"

#include <cmath>
#include <string>

namespace waveclust {

struct PenaltySpec {
    double scale = 0.0;
    Vector weights;
};

namespace detail {

inline void check_penalty(const PenaltySpec& spec, Eigen::Index groups, const char* what) {
    if (spec.weights.size() != groups) {
        throw InvalidInput(std::string(what) + ": expected " + std::to_string(groups) +
                           " weights, got " + std::to_string(spec.weights.size()));
    }
    if (!(spec.scale >= 0.0)) throw InvalidInput(std::string(what) + ": scale must be >= 0");
}

// Multiplicative factor of the group soft-threshold for a group of squared
// norm sq and threshold tau.
inline double shrink_factor(double sq, double tau) {
    if (tau <= 0.0) return 1.0;
    const double norm = std::sqrt(sq);
    return norm <= tau ? 0.0 : 1.0 - tau / norm;
}

inline double clip_factor(double sq, double tau) {
    const double norm = std::sqrt(sq);
    return norm <= tau ? 1.0 : tau / norm;
}

}  // namespace detail

// In-place forms used inside solver loops. Matrices are row-major, so
// column norms are accumulated row by row and applied as one scaling pass.
inline void prox_group_rows_inplace(Matrix& m, double scale, const Eigen::Ref<const Vector>& weights) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        const double f = detail::shrink_factor(m.row(r).squaredNorm(), scale * weights[r]);
        if (f == 0.0) {
            m.row(r).setZero();
        } else if (f != 1.0) {
            m.row(r) *= f;
        }
    }
}

inline void prox_group_cols_inplace(Matrix& m, double scale, const Eigen::Ref<const Vector>& weights) {
    if (scale <= 0.0) return;
    const RowVector sq = m.colwise().squaredNorm();
    RowVector factor(m.cols());
    for (Eigen::Index c = 0; c < m.cols(); ++c) factor[c] = detail::shrink_factor(sq[c], scale * weights[c]);
    m.array().rowwise() *= factor.array();
}

inline void project_dual_ball_rows_inplace(Matrix& m, double scale,
                                           const Eigen::Ref<const Vector>& weights) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        const double f = detail::clip_factor(m.row(r).squaredNorm(), scale * weights[r]);
        if (f != 1.0) m.row(r) *= f;
    }
}

// Row r -> (1 - tau_r / ||M_r||)_+ M_r.
inline Matrix prox_group_rows(const Matrix& m, const PenaltySpec& spec) {
    detail::check_penalty(spec, m.rows(), "prox_group_rows");
    Matrix out = m;
    prox_group_rows_inplace(out, spec.scale, spec.weights);
    return out;
}

// Column j -> (1 - tau_j / ||M_.j||)_+ M_.j.
inline Matrix prox_group_cols(const Matrix& m, const PenaltySpec& spec) {
    detail::check_penalty(spec, m.cols(), "prox_group_cols");
    Matrix out = m;
    prox_group_cols_inplace(out, spec.scale, spec.weights);
    return out;
}

// Row r -> M_r * min(1, tau_r / ||M_r||): Euclidean projection onto the
// dual-norm ball of the weighted row-group norm. prox + projection = identity.
inline Matrix project_dual_ball_rows(const Matrix& m, const PenaltySpec& spec) {
    detail::check_penalty(spec, m.rows(), "project_dual_ball_rows");
    Matrix out = m;
    project_dual_ball_rows_inplace(out, spec.scale, spec.weights);
    return out;
}

}  // namespace waveclust
