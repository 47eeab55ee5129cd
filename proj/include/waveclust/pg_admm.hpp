#pragma once

// Multi-block ADMM whose primal step is a single proximal-gradient step on
// the U-subproblem, with step s = 1 / lambda_max(I + rho D^T D):
//
//   U <- prox_cols((1 - s) U + s X - s rho D^T (D U - V + Z); s gamma, omega)
//   V <- prox_rows(D U + Z; lambda / rho, w)
//   Z <- Z + D U - V
//
// using the freshly updated U and V in the dual step.

#include "waveclust/edge_pass.hpp"
#include "waveclust/problem.hpp"
#include "waveclust/prox.hpp"
#include "waveclust/spectral.hpp"

#include <cmath>

namespace waveclust {

class PgAdmm {
public:
    struct State {
        Matrix u, v, z;
        Matrix dt_v, dt_z, work_n, dt_v_prev;
        detail::EdgeScratch scratch;
    };

    PgAdmm(const ProblemSpec& spec, double rho) : spec_(spec), rho_(rho) {
        if (!(rho > 0.0)) throw InvalidConfig("rho must be positive");
        step_ = 1.0 / (1.0 + rho * max_eigenvalue_gram(spec.d));
        gram_ = SparseMatrix(spec.d.transpose() * spec.d);
    }

    double rho() const { return rho_; }
    double step_size() const { return step_; }

    State init() const {
        State s;
        s.u = spec_.x;
        s.v = spec_.d * spec_.x;
        s.z = Matrix::Zero(spec_.m(), spec_.t());
        s.dt_v = spec_.d.transpose() * s.v;
        s.dt_z = Matrix::Zero(spec_.n(), spec_.t());
        s.scratch.reserve(spec_.t());
        return s;
    }

    StepResiduals step(State& s) const {
        // D^T (D U - V + Z) = D^T D U - D^T V + D^T Z.
        s.work_n.noalias() = gram_ * s.u;
        s.work_n += s.dt_z - s.dt_v;
        s.u = (1.0 - step_) * s.u + step_ * spec_.x - (step_ * rho_) * s.work_n;
        prox_group_cols_inplace(s.u, step_ * spec_.gamma, spec_.sparsity_weights);
        detail::check_finite(s.u, "PG-ADMM primal iterate");

        s.dt_v_prev = s.dt_v;
        const auto edges = detail::fused_edge_pass(spec_.d, s.u, spec_.lambda / rho_, spec_.fusion_weights, s.v,
                                                   s.z, s.dt_v, s.dt_z, s.scratch);

        StepResiduals res;
        res.primal = std::sqrt(edges.residual_sq);
        res.dual = rho_ * (s.dt_v - s.dt_v_prev).norm();
        res.relative_primal = res.primal / detail::safe_scale(std::sqrt(edges.du_sq), std::sqrt(edges.v_sq));
        res.relative_dual = res.dual / detail::safe_scale(rho_ * s.dt_z.norm());
        return res;
    }

    const Matrix& primal(const State& s) const { return s.u; }

    void finish(const State& s, SolveReport& report) const {
        report.u = s.u;
        report.fusion_copy = s.v;
        report.sparse_copy = s.u;
    }

    SolveReport solve(const SolverConfig& config, const IterationObserver& observer = {}) const {
        State s = init();
        return detail::run_solver(*this, spec_, config, s, observer);
    }

private:
    const ProblemSpec& spec_;
    double rho_;
    double step_ = 1.0;
    SparseMatrix gram_;
};

inline SolveReport pg_admm_solve(const ProblemSpec& spec, const SolverConfig& config,
                                 const IterationObserver& observer = {}) {
    spec.validate();
    SolverConfig cfg = config;
    cfg.solver = SolverKind::PgAdmm;
    return PgAdmm(spec, config.rho.value_or(1.0)).solve(cfg, observer);
}

}  // namespace waveclust
