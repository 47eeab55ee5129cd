#pragma once

// Alternating minimization with the copy variable eliminated by Moreau's
// decomposition. Z is the unscaled dual (m x T):
//
//   U <- prox_cols(X - D^T Z; gamma, omega)
//   Z <- rho * Proj_{lambda/rho ball}(D U + Z / rho)
//
// where the ball is the dual ball of the weighted row-group norm. Converges
// only for rho < 2 / lambda_max(D^T D).

#include "waveclust/problem.hpp"
#include "waveclust/prox.hpp"
#include "waveclust/spectral.hpp"

#include <cmath>
#include <sstream>

namespace waveclust {

inline double s_ama_default_rho(const SparseMatrix& d) {
    const double lmax = max_eigenvalue_gram(d);
    return lmax > 0.0 ? 0.99 * 2.0 / lmax : 1.0;
}

class SAma {
public:
    struct State {
        Matrix u, z;
        Matrix dt_z, u_prev;
        RowVector du_row, z_row;
    };

    SAma(const ProblemSpec& spec, double rho) : spec_(spec), rho_(rho) {
        if (!(rho > 0.0)) throw InvalidConfig("rho must be positive");
        gram_max_ = max_eigenvalue_gram(spec.d);
        if (rho * gram_max_ >= 2.0) {
            std::ostringstream msg;
            msg << "S-AMA step rho = " << rho << " violates rho < 2 / lambda_max(D^T D) = "
                << 2.0 / gram_max_;
            throw InvalidConfig(msg.str());
        }
    }

    double rho() const { return rho_; }
    double gram_max() const { return gram_max_; }

    State init() const {
        State s;
        s.z = Matrix::Zero(spec_.m(), spec_.t());
        s.dt_z = Matrix::Zero(spec_.n(), spec_.t());
        s.u = spec_.x;
        s.du_row.resize(spec_.t());
        s.z_row.resize(spec_.t());
        return s;
    }

    StepResiduals step(State& s) const {
        s.u_prev.swap(s.u);
        s.u = spec_.x - s.dt_z;
        prox_group_cols_inplace(s.u, spec_.gamma, spec_.sparsity_weights);
        detail::check_finite(s.u, "S-AMA primal iterate");

        // Dual step edge by edge, rebuilding D^T Z. The implicit copy is
        // V = D U + (Z - Z_next) / rho, so D U - V = (Z_next - Z) / rho.
        double change_sq = 0.0;
        double du_sq = 0.0;
        double v_sq = 0.0;
        s.dt_z.setZero();
        for (Eigen::Index e = 0; e < spec_.m(); ++e) {
            detail::sparse_row_product(spec_.d, e, s.u, s.du_row);
            auto ze = s.z.row(e);
            s.z_row = ze;
            ze += rho_ * s.du_row;
            const double f = detail::clip_factor(ze.squaredNorm(), spec_.lambda * spec_.fusion_weights[e]);
            if (f != 1.0) ze *= f;
            s.z_row -= ze;
            change_sq += s.z_row.squaredNorm();
            du_sq += s.du_row.squaredNorm();
            v_sq += (s.du_row + s.z_row / rho_).squaredNorm();
            detail::sparse_row_scatter(spec_.d, e, ze, s.dt_z);
        }

        StepResiduals res;
        res.primal = std::sqrt(change_sq) / rho_;
        res.dual = (s.u - s.u_prev).norm();
        res.relative_primal = res.primal / detail::safe_scale(std::sqrt(du_sq), std::sqrt(v_sq));
        res.relative_dual = res.dual / detail::safe_scale(s.u.norm());
        return res;
    }

    const Matrix& primal(const State& s) const { return s.u; }

    void finish(const State& s, SolveReport& report) const {
        report.u = s.u;
        report.sparse_copy = s.u;
        // Explicit copy V = prox(D U + Z / rho) so fused edges are exact zeros.
        Matrix v = spec_.d * s.u;
        v += s.z / rho_;
        prox_group_rows_inplace(v, spec_.lambda / rho_, spec_.fusion_weights);
        report.fusion_copy = std::move(v);
    }

    SolveReport solve(const SolverConfig& config, const IterationObserver& observer = {}) const {
        State s = init();
        return detail::run_solver(*this, spec_, config, s, observer);
    }

private:
    const ProblemSpec& spec_;
    double rho_;
    double gram_max_ = 0.0;
};

inline SolveReport s_ama_solve(const ProblemSpec& spec, const SolverConfig& config,
                               const IterationObserver& observer = {}) {
    spec.validate();
    SolverConfig cfg = config;
    cfg.solver = SolverKind::SAma;
    const double rho = config.rho ? *config.rho : s_ama_default_rho(spec.d);
    return SAma(spec, rho).solve(cfg, observer);
}

}  // namespace waveclust
