#pragma once

// Wall-clock comparison of the solvers on one problem. Each solver runs
// until its objective is within `gap_tol` (relative) of a reference optimum
// computed beforehand by a tightly converged CB-ADMM solve. Objective
// evaluation happens in the observer, so it is not charged to the solver.

#include "waveclust/problem.hpp"
#include "waveclust/solve.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace waveclust {

struct BenchOptions {
    double gap_tol = 1e-6;
    int max_iters = 100000;
    // Reference solve.
    double reference_tol = 1e-10;
    int reference_max_iters = 200000;
    std::optional<double> rho;
    InnerSolverSettings inner;
};

struct BenchTrace {
    SolverKind solver = SolverKind::CbAdmm;
    std::vector<int> iterations;
    std::vector<double> gaps;
    std::vector<double> wall_seconds;
    bool reached = false;
    int iterations_to_tol = 0;
    double seconds_to_tol = 0.0;
    double total_seconds = 0.0;
    long inner_iterations = 0;
    double final_objective = 0.0;
};

struct BenchResult {
    double reference_objective = 0.0;
    int reference_iterations = 0;
    bool reference_converged = false;
    std::vector<BenchTrace> traces;

    const BenchTrace* find(SolverKind kind) const {
        for (const auto& t : traces) {
            if (t.solver == kind) return &t;
        }
        return nullptr;
    }
};

inline double relative_gap(double value, double reference) {
    return (value - reference) / std::max(std::abs(reference), 1e-300);
}

struct ReferenceSolution {
    double objective = 0.0;
    int iterations = 0;
    bool converged = false;
};

inline ReferenceSolution reference_objective(const ProblemSpec& spec, const BenchOptions& opt) {
    SolverConfig cfg;
    cfg.solver = SolverKind::CbAdmm;
    cfg.rho = opt.rho;
    cfg.tol_primal = opt.reference_tol;
    cfg.tol_dual = opt.reference_tol;
    cfg.max_iters = opt.reference_max_iters;
    const SolveReport rep = solve(spec, cfg);
    return {rep.objective, rep.iterations, rep.converged};
}

// Runs one solver against a known reference objective.
inline BenchTrace bench_solver(const ProblemSpec& spec, SolverKind kind, double reference,
                               const BenchOptions& opt) {
    SolverConfig cfg;
    cfg.solver = kind;
    // S-AMA has its own step bound; every other solver shares rho.
    if (kind != SolverKind::SAma) cfg.rho = opt.rho;
    cfg.max_iters = opt.max_iters;
    cfg.tol_primal = 0.0;
    cfg.tol_dual = 0.0;
    cfg.inner = opt.inner;

    BenchTrace trace;
    trace.solver = kind;
    auto observer = [&](const IterationView& view) {
        const double gap = relative_gap(objective(spec, view.u), reference);
        trace.iterations.push_back(view.iteration);
        trace.gaps.push_back(gap);
        trace.wall_seconds.push_back(view.elapsed_seconds);
        if (gap <= opt.gap_tol) {
            trace.reached = true;
            trace.iterations_to_tol = view.iteration;
            trace.seconds_to_tol = view.elapsed_seconds;
            return false;
        }
        return true;
    };
    const SolveReport rep = solve(spec, cfg, observer);
    trace.total_seconds = rep.wall_seconds;
    trace.inner_iterations = rep.inner_iterations;
    trace.final_objective = rep.objective;
    return trace;
}

inline BenchResult run_bench(const ProblemSpec& spec, const std::vector<SolverKind>& solvers,
                             const BenchOptions& opt) {
    spec.validate();
    BenchResult out;
    const auto ref = reference_objective(spec, opt);
    out.reference_objective = ref.objective;
    out.reference_iterations = ref.iterations;
    out.reference_converged = ref.converged;
    for (SolverKind kind : solvers) out.traces.push_back(bench_solver(spec, kind, ref.objective, opt));
    return out;
}

}  // namespace waveclust
