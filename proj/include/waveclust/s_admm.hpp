#pragma once

// Two-block ADMM with the sparsity penalty kept in the primal step. The
// U-update is a multi-task group lasso
//
//   min_U 1/2 ||U - X||^2 + rho/2 ||D U - V + Z||^2 + gamma sum_j omega_j ||U_.j||
//
// solved by warm-started accelerated proximal gradient (FISTA).

#include "waveclust/edge_pass.hpp"
#include "waveclust/problem.hpp"
#include "waveclust/prox.hpp"
#include "waveclust/spectral.hpp"

#include <cmath>

namespace waveclust {

class SAdmm {
public:
    struct State {
        Matrix u, v, z;
        Matrix dt_v, dt_z;
        // FISTA buffers and the offset b = X + rho D^T (V - Z).
        Matrix b, y, next, grad, work_n;
        detail::EdgeScratch scratch;
        long inner_iterations = 0;
        int inner_failures = 0;
    };

    SAdmm(const ProblemSpec& spec, double rho, InnerSolverSettings inner)
        : spec_(spec), rho_(rho), inner_(inner) {
        if (!(rho > 0.0)) throw InvalidConfig("rho must be positive");
        lipschitz_ = 1.0 + rho * max_eigenvalue_gram(spec.d);
        gram_ = SparseMatrix(spec.d.transpose() * spec.d);
    }

    double rho() const { return rho_; }
    double lipschitz() const { return lipschitz_; }

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

    // Gradient of the smooth part of the U-subproblem,
    // U - X + rho D^T (D U - V + Z) = U + rho D^T D U - b.
    void inner_gradient(const Matrix& u, const Matrix& b, Matrix& out) const {
        out.noalias() = gram_ * u;
        out = u + rho_ * out - b;
    }

    StepResiduals step(State& s) const {
        s.b = spec_.x + rho_ * (s.dt_v - s.dt_z);
        const double step = 1.0 / lipschitz_;
        s.y = s.u;
        double t = 1.0;
        bool inner_done = false;
        for (int k = 0; k < inner_.max_iters; ++k) {
            inner_gradient(s.y, s.b, s.grad);
            s.next = s.y - step * s.grad;
            prox_group_cols_inplace(s.next, spec_.gamma * step, spec_.sparsity_weights);
            const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
            s.grad = s.next - s.u;
            const double change = s.grad.norm();
            s.y = s.next + ((t - 1.0) / t_next) * s.grad;
            s.u.swap(s.next);
            t = t_next;
            ++s.inner_iterations;
            if (change <= inner_.tol * std::max(s.u.norm(), 1.0)) {
                inner_done = true;
                break;
            }
        }
        if (!inner_done) ++s.inner_failures;
        detail::check_finite(s.u, "S-ADMM primal iterate");

        s.work_n = s.dt_v;
        const auto edges = detail::fused_edge_pass(spec_.d, s.u, spec_.lambda / rho_, spec_.fusion_weights, s.v,
                                                   s.z, s.dt_v, s.dt_z, s.scratch);

        StepResiduals res;
        res.primal = std::sqrt(edges.residual_sq);
        res.dual = rho_ * (s.dt_v - s.work_n).norm();
        res.relative_primal = res.primal / detail::safe_scale(std::sqrt(edges.du_sq), std::sqrt(edges.v_sq));
        res.relative_dual = res.dual / detail::safe_scale(rho_ * s.dt_z.norm());
        return res;
    }
    const Matrix& primal(const State& s) const { return s.u; }

    void finish(const State& s, SolveReport& report) const {
        report.u = s.u;
        report.fusion_copy = s.v;
        report.sparse_copy = s.u;
        report.inner_iterations = s.inner_iterations;
        if (s.inner_failures > 0) {
            report.warnings.push_back("inner group-lasso solver hit its iteration cap in " +
                                      std::to_string(s.inner_failures) + " outer iterations");
        }
    }

    SolveReport solve(const SolverConfig& config, const IterationObserver& observer = {}) const {
        State s = init();
        return detail::run_solver(*this, spec_, config, s, observer);
    }

private:
    const ProblemSpec& spec_;
    double rho_;
    InnerSolverSettings inner_;
    double lipschitz_ = 1.0;
    SparseMatrix gram_;
};

inline SolveReport s_admm_solve(const ProblemSpec& spec, const SolverConfig& config,
                                const IterationObserver& observer = {}) {
    spec.validate();
    SolverConfig cfg = config;
    cfg.solver = SolverKind::SAdmm;
    return SAdmm(spec, config.rho.value_or(1.0), config.inner).solve(cfg, observer);
}

}  // namespace waveclust
