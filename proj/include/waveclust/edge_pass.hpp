#pragma once

// Edge-side update shared by the ADMM variants, done one row of D at a time
// so each edge row stays in cache:
//
//   V_e <- prox(D_e U + Z_e; scale * w_e),  Z_e <- Z_e + D_e U - V_e
//
// while rebuilding D^T V and D^T Z.

#include "waveclust/matrix.hpp"
#include "waveclust/problem.hpp"
#include "waveclust/prox.hpp"

namespace waveclust::detail {

struct EdgePassNorms {
    double residual_sq = 0.0;  // ||D U - V||^2
    double du_sq = 0.0;
    double v_sq = 0.0;
};

struct EdgeScratch {
    RowVector du_row, diff_row;
    void reserve(Eigen::Index t) {
        du_row.resize(t);
        diff_row.resize(t);
    }
};

inline EdgePassNorms fused_edge_pass(const SparseMatrix& d, const Matrix& u, double scale, const Vector& weights,
                                     Matrix& v, Matrix& z, Matrix& dt_v, Matrix& dt_z, EdgeScratch& scratch) {
    EdgePassNorms out;
    dt_v.setZero();
    dt_z.setZero();
    for (Eigen::Index e = 0; e < d.rows(); ++e) {
        sparse_row_product(d, e, u, scratch.du_row);
        auto ve = v.row(e);
        auto ze = z.row(e);
        ve = scratch.du_row + ze;
        const double f = shrink_factor(ve.squaredNorm(), scale * weights[e]);
        if (f == 0.0) {
            ve.setZero();
        } else if (f != 1.0) {
            ve *= f;
        }
        scratch.diff_row = scratch.du_row - ve;
        out.residual_sq += scratch.diff_row.squaredNorm();
        out.du_sq += scratch.du_row.squaredNorm();
        out.v_sq += ve.squaredNorm();
        ze += scratch.diff_row;
        sparse_row_scatter(d, e, ve, dt_v);
        sparse_row_scatter(d, e, ze, dt_z);
    }
    return out;
}

}  // namespace waveclust::detail
