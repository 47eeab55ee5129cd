#pragma once

#include "waveclust/error.hpp"
#include "waveclust/matrix.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace waveclust {

// Sparse convex clustering in fixed coordinates:
//
//   1/2 ||U - X||_F^2 + lambda sum_e w_e ||(D U)_e||_2 + gamma sum_j omega_j ||U_.j||_2
//
// D is any m x n matrix (usually a directed difference matrix).
struct ProblemSpec {
    Matrix x;
    SparseMatrix d;
    double lambda = 0.0;
    double gamma = 0.0;
    Vector fusion_weights;
    Vector sparsity_weights;

    Eigen::Index n() const { return x.rows(); }
    Eigen::Index t() const { return x.cols(); }
    Eigen::Index m() const { return d.rows(); }

    void validate() const {
        detail::require(lambda >= 0.0 && std::isfinite(lambda), "lambda must be finite and >= 0");
        detail::require(gamma >= 0.0 && std::isfinite(gamma), "gamma must be finite and >= 0");
        detail::require(d.cols() == x.rows(), "D must have one column per observation");
        detail::require(fusion_weights.size() == d.rows(), "need one fusion weight per row of D");
        detail::require(sparsity_weights.size() == x.cols(), "need one sparsity weight per column of X");
        detail::require((fusion_weights.array() >= 0.0).all(), "fusion weights must be non-negative");
        detail::require((sparsity_weights.array() >= 0.0).all(), "sparsity weights must be non-negative");
        detail::require(x.allFinite(), "X contains non-finite values");
    }
};

inline double fusion_penalty(const ProblemSpec& spec, const Matrix& u) {
    const Matrix du = spec.d * u;
    const Vector norms = du.array().square().rowwise().sum().sqrt();
    return spec.fusion_weights.dot(norms);
}

inline double sparsity_penalty(const ProblemSpec& spec, const Matrix& u) {
    double total = 0.0;
    for (Eigen::Index j = 0; j < u.cols(); ++j) total += spec.sparsity_weights[j] * u.col(j).norm();
    return total;
}

inline double objective(const ProblemSpec& spec, const Matrix& u) {
    detail::require(u.rows() == spec.n() && u.cols() == spec.t(), "objective: U has the wrong shape");
    detail::require(spec.d.cols() == spec.n(), "objective: D does not match X");
    detail::require(spec.fusion_weights.size() == spec.m() && spec.sparsity_weights.size() == spec.t(),
                    "objective: weight lengths do not match the problem");
    double value = 0.5 * (u - spec.x).squaredNorm();
    if (spec.lambda != 0.0) value += spec.lambda * fusion_penalty(spec, u);
    if (spec.gamma != 0.0) value += spec.gamma * sparsity_penalty(spec, u);
    return value;
}

enum class SolverKind { CbAdmm, SAdmm, SAma, PgAdmm };

inline std::string_view solver_name(SolverKind kind) {
    switch (kind) {
        case SolverKind::CbAdmm: return "cb_admm";
        case SolverKind::SAdmm: return "s_admm";
        case SolverKind::SAma: return "s_ama";
        case SolverKind::PgAdmm: return "pg_admm";
    }
    return "unknown";
}

inline SolverKind parse_solver(std::string_view name) {
    if (name == "cb_admm") return SolverKind::CbAdmm;
    if (name == "s_admm") return SolverKind::SAdmm;
    if (name == "s_ama") return SolverKind::SAma;
    if (name == "pg_admm") return SolverKind::PgAdmm;
    throw InvalidConfig("unknown solver '" + std::string(name) +
                        "' (expected cb_admm, s_admm, s_ama or pg_admm)");
}

struct InnerSolverSettings {
    int max_iters = 500;
    double tol = 1e-8;
};

struct SolverConfig {
    SolverKind solver = SolverKind::CbAdmm;
    // Unset: 1.0 for the ADMM variants, 0.99 * 2 / lambda_max(D^T D) for S-AMA.
    std::optional<double> rho;
    int max_iters = 100000;
    double tol_primal = 1e-6;
    double tol_dual = 1e-6;
    InnerSolverSettings inner;
    // Evaluate the objective at every iteration into the trace.
    bool trace_objective = false;
};

struct IterationRecord {
    int iteration = 0;
    double primal_residual = 0.0;  // absolute
    double dual_residual = 0.0;    // absolute
    double objective = std::numeric_limits<double>::quiet_NaN();
    double elapsed_seconds = 0.0;
};

struct SolveReport {
    SolverKind solver = SolverKind::CbAdmm;
    double rho = 0.0;
    Matrix u;              // primal iterate
    Matrix fusion_copy;    // V_1: m x T, exact zero rows mark fused edges
    Matrix sparse_copy;    // n x T, exact zero columns mark dropped coefficients
    bool converged = false;
    int iterations = 0;
    double wall_seconds = 0.0;
    double primal_residual = 0.0;  // relative, as used by the stopping rule
    double dual_residual = 0.0;
    double objective = 0.0;
    long inner_iterations = 0;
    std::vector<IterationRecord> trace;
    std::vector<std::string> warnings;
};

// Residuals of one iteration. `relative_*` drive the stopping rule.
struct StepResiduals {
    double primal = 0.0;
    double dual = 0.0;
    double relative_primal = 0.0;
    double relative_dual = 0.0;
};

// What an observer sees after each iteration. Returning false stops the solve
// (reported as not converged unless the residual test also passed).
struct IterationView {
    int iteration = 0;
    const Matrix& u;
    const StepResiduals& residuals;
    double elapsed_seconds = 0.0;  // solver time, observer time excluded
};

using IterationObserver = std::function<bool(const IterationView&)>;

namespace detail {

class Stopwatch {
public:
    using clock = std::chrono::steady_clock;

    void start() { begin_ = clock::now(); }
    void stop() { total_ += std::chrono::duration<double>(clock::now() - begin_).count(); }
    double seconds() const { return total_; }

private:
    clock::time_point begin_{};
    double total_ = 0.0;
};

inline void check_finite(const Matrix& m, const char* what) {
    if (!m.allFinite()) throw NumericalFailure(std::string("non-finite values in ") + what);
}

// Generic outer loop shared by every solver. Solver provides
// `StepResiduals step(State&)`, `const Matrix& primal(const State&)` and
// `void finish(const State&, SolveReport&)`.
template <class Solver, class State>
SolveReport run_solver(const Solver& solver, const ProblemSpec& spec, const SolverConfig& config,
                       State& state, const IterationObserver& observer) {
    SolveReport report;
    report.solver = config.solver;
    report.rho = solver.rho();
    Stopwatch clock;
    int it = 0;
    StepResiduals res;
    bool stop_requested = false;
    while (it < config.max_iters && !stop_requested) {
        clock.start();
        res = solver.step(state);
        ++it;
        const bool done = res.relative_primal < config.tol_primal && res.relative_dual < config.tol_dual;
        clock.stop();

        IterationRecord rec;
        rec.iteration = it;
        rec.primal_residual = res.primal;
        rec.dual_residual = res.dual;
        rec.elapsed_seconds = clock.seconds();
        if (config.trace_objective) rec.objective = objective(spec, solver.primal(state));
        report.trace.push_back(rec);

        if (observer) {
            const IterationView view{it, solver.primal(state), res, clock.seconds()};
            if (!observer(view)) stop_requested = true;
        }
        if (done) {
            report.converged = true;
            break;
        }
    }
    report.iterations = it;
    report.wall_seconds = clock.seconds();
    report.primal_residual = res.relative_primal;
    report.dual_residual = res.relative_dual;
    solver.finish(state, report);
    report.objective = objective(spec, report.u);
    if (!report.converged) {
        report.warnings.push_back("stopped after " + std::to_string(it) +
                                  " iterations without meeting the tolerance");
    }
    return report;
}

inline double safe_scale(double a, double b = 0.0, double c = 0.0) {
    return std::max({a, b, c, 1.0});
}

// out = row e of (D * U) for row-major sparse D.
template <class Out>
void sparse_row_product(const SparseMatrix& d, Eigen::Index e, const Matrix& u, Out&& out) {
    out.setZero();
    for (SparseMatrix::InnerIterator it(d, e); it; ++it) out += it.value() * u.row(it.col());
}

// acc += D(e, :)^T * row, i.e. scatters one edge row back onto the nodes.
template <class Row>
void sparse_row_scatter(const SparseMatrix& d, Eigen::Index e, const Row& row, Matrix& acc) {
    for (SparseMatrix::InnerIterator it(d, e); it; ++it) acc.row(it.col()) += it.value() * row;
}

}  // namespace detail
}  // namespace waveclust
