#pragma once

#include "waveclust/cb_admm.hpp"
#include "waveclust/pg_admm.hpp"
#include "waveclust/problem.hpp"
#include "waveclust/s_admm.hpp"
#include "waveclust/s_ama.hpp"

namespace waveclust {

// Dispatches on config.solver. `cache` is only consulted by CB-ADMM.
inline SolveReport solve(const ProblemSpec& spec, const SolverConfig& config,
                         const IterationObserver& observer = {},
                         FactorizationCache* cache = nullptr) {
    switch (config.solver) {
        case SolverKind::CbAdmm: return cb_admm_solve(spec, config, observer, cache);
        case SolverKind::SAdmm: return s_admm_solve(spec, config, observer);
        case SolverKind::SAma: return s_ama_solve(spec, config, observer);
        case SolverKind::PgAdmm: return pg_admm_solve(spec, config, observer);
    }
    throw InvalidConfig("unknown solver");
}

}  // namespace waveclust
