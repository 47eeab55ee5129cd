#pragma once

// Cartesian-Block ADMM. The copy variable is the pair (V1, V2) = (D U, U),
// so both penalties get closed-form proximal updates and the primal step is
// one solve against the cached SPD matrix (1 + rho) I + rho D^T D:
//
//   U   <- [(1 + rho) I + rho D^T D]^{-1} [X + rho D^T (V1 - Z1) + rho (V2 - Z2)]
//   V1  <- prox_rows(D U + Z1; lambda / rho, w)
//   V2  <- prox_cols(U + Z2; gamma / rho, omega)
//   Z1  <- Z1 + D U - V1
//   Z2  <- Z2 + U - V2
//
// Started from V1 = D X, V2 = X and zero (scaled) duals.

#include "waveclust/edge_pass.hpp"
#include "waveclust/problem.hpp"
#include "waveclust/prox.hpp"

#include <Eigen/SparseCholesky>

#include <bit>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <tuple>
#include <vector>

namespace waveclust {

// Cholesky factorization of (1 + rho) I + rho D^T D. Tiny systems use a dense
// factor; otherwise a sparse simplicial factor, which for kNN graphs stays
// within a small multiple of nnz(D^T D).
class SpdFactorization {
public:
    static constexpr Eigen::Index kDenseLimit = 64;

    SpdFactorization(const SparseMatrix& d, double rho) : n_(d.cols()), rho_(rho) {
        if (!(rho > 0.0)) throw InvalidConfig("rho must be positive");
        Eigen::SparseMatrix<double> a = Eigen::SparseMatrix<double>(d.transpose() * d) * rho;
        Eigen::SparseMatrix<double> id(n_, n_);
        id.setIdentity();
        a += id * (1.0 + rho);
        a.makeCompressed();
        if (n_ <= kDenseLimit) {
            dense_.compute(Eigen::MatrixXd(a));
            if (dense_.info() != Eigen::Success) throw NumericalFailure("Cholesky factorization failed");
            return;
        }
        Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(a);
        if (llt.info() != Eigen::Success) throw NumericalFailure("Cholesky factorization failed");
        perm_ = llt.permutationP();
        perm_inv_ = llt.permutationPinv();
        const Eigen::SparseMatrix<double> l = llt.matrixL();
        diag_.resize(n_);
        col_start_.assign(static_cast<std::size_t>(n_) + 1, 0);
        for (Eigen::Index j = 0; j < n_; ++j) {
            for (Eigen::SparseMatrix<double>::InnerIterator it(l, j); it; ++it) {
                if (it.row() == j) {
                    diag_[j] = it.value();
                } else {
                    rows_.push_back(it.row());
                    vals_.push_back(it.value());
                }
            }
            col_start_[static_cast<std::size_t>(j) + 1] = rows_.size();
        }
    }

    Matrix solve(const Matrix& rhs) const {
        Matrix out = rhs;
        solve_in_place(out);
        return out;
    }

    // The sparse path applies P^T L^-T L^-1 P one whole row at a time, which
    // keeps every update a contiguous axpy on the row-major right-hand side.
    void solve_in_place(Matrix& rhs) const {
        if (diag_.size() == 0) {
            dense_.solveInPlace(rhs);
            return;
        }
        Matrix y = perm_ * rhs;
        for (Eigen::Index j = 0; j < n_; ++j) {
            y.row(j) /= diag_[j];
            for (std::size_t k = col_start_[static_cast<std::size_t>(j)]; k < col_start_[static_cast<std::size_t>(j) + 1]; ++k)
                y.row(rows_[k]) -= vals_[k] * y.row(j);
        }
        for (Eigen::Index j = n_ - 1; j >= 0; --j) {
            for (std::size_t k = col_start_[static_cast<std::size_t>(j)]; k < col_start_[static_cast<std::size_t>(j) + 1]; ++k)
                y.row(j) -= vals_[k] * y.row(rows_[k]);
            y.row(j) /= diag_[j];
        }
        rhs.noalias() = perm_inv_ * y;
    }

    Eigen::Index size() const { return n_; }
    double rho() const { return rho_; }

private:
    Eigen::Index n_;
    double rho_;
    Eigen::LLT<Eigen::MatrixXd> dense_;
    // Sparse factor A = P^T L L^T P, off-diagonal entries of L by column.
    Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> perm_, perm_inv_;
    Vector diag_;
    std::vector<std::size_t> col_start_;
    std::vector<Eigen::Index> rows_;
    std::vector<double> vals_;
};

// Shares factorizations between solves over the same (D, rho), e.g. across a
// tuning grid. Concurrent lookups take a shared lock; insertion is exclusive.
class FactorizationCache {
public:
    std::shared_ptr<const SpdFactorization> get(const SparseMatrix& d, double rho) {
        const Key key = make_key(d, rho);
        {
            std::shared_lock lock(mutex_);
            if (auto it = entries_.find(key); it != entries_.end()) return it->second;
        }
        auto fact = std::make_shared<const SpdFactorization>(d, rho);
        std::unique_lock lock(mutex_);
        auto [it, inserted] = entries_.emplace(key, std::move(fact));
        return it->second;
    }

    std::size_t size() const {
        std::shared_lock lock(mutex_);
        return entries_.size();
    }

private:
    // Full structural key: dims, rho bits and every stored entry.
    using Key = std::tuple<Eigen::Index, Eigen::Index, std::uint64_t, std::vector<std::uint64_t>>;

    static Key make_key(const SparseMatrix& d, double rho) {
        std::vector<std::uint64_t> entries;
        entries.reserve(static_cast<std::size_t>(d.nonZeros()) * 2);
        for (int k = 0; k < d.outerSize(); ++k) {
            for (SparseMatrix::InnerIterator it(d, k); it; ++it) {
                entries.push_back((static_cast<std::uint64_t>(it.row()) << 32) |
                                  static_cast<std::uint64_t>(it.col()));
                entries.push_back(std::bit_cast<std::uint64_t>(it.value()));
            }
        }
        return {d.rows(), d.cols(), std::bit_cast<std::uint64_t>(rho), std::move(entries)};
    }

    mutable std::shared_mutex mutex_;
    std::map<Key, std::shared_ptr<const SpdFactorization>> entries_;
};

class CbAdmm {
public:
    struct State {
        Matrix u, v1, v2, z1, z2;
        // Cached products D^T V1 and D^T Z1, plus scratch.
        Matrix dt_v1, dt_z1;
        Matrix work_n;
        detail::EdgeScratch scratch;
    };

    CbAdmm(const ProblemSpec& spec, double rho)
        : CbAdmm(spec, std::make_shared<const SpdFactorization>(spec.d, rho)) {}

    CbAdmm(const ProblemSpec& spec, std::shared_ptr<const SpdFactorization> factor)
        : spec_(spec), factor_(std::move(factor)) {
        detail::require(factor_ && factor_->size() == spec.n(), "factorization does not match D");
    }

    double rho() const { return factor_->rho(); }
    const SpdFactorization& factorization() const { return *factor_; }

    State init() const {
        State s;
        s.u = spec_.x;
        s.v1 = spec_.d * spec_.x;
        s.v2 = spec_.x;
        s.z1 = Matrix::Zero(spec_.m(), spec_.t());
        s.z2 = Matrix::Zero(spec_.n(), spec_.t());
        s.dt_v1 = spec_.d.transpose() * s.v1;
        s.dt_z1 = Matrix::Zero(spec_.n(), spec_.t());
        s.scratch.reserve(spec_.t());
        return s;
    }

    // Right-hand side of the U-update linear system for the current state.
    Matrix u_rhs(const State& s) const {
        const double r = rho();
        return spec_.x + r * (s.dt_v1 - s.dt_z1 + s.v2 - s.z2);
    }

    StepResiduals step(State& s) const {
        const double r = rho();
        s.u = spec_.x + r * (s.dt_v1 - s.dt_z1 + s.v2 - s.z2);
        factor_->solve_in_place(s.u);
        detail::check_finite(s.u, "CB-ADMM primal iterate");

        // D^T V1 + V2 before the copy update, for the dual residual.
        s.work_n = s.dt_v1 + s.v2;

        s.v2 = s.u + s.z2;
        prox_group_cols_inplace(s.v2, spec_.gamma / r, spec_.sparsity_weights);
        const double r2_sq = (s.u - s.v2).squaredNorm();
        s.z2 += s.u - s.v2;

        const auto edges = detail::fused_edge_pass(spec_.d, s.u, spec_.lambda / r, spec_.fusion_weights, s.v1,
                                                   s.z1, s.dt_v1, s.dt_z1, s.scratch);

        StepResiduals res;
        res.primal = std::sqrt(edges.residual_sq + r2_sq);
        res.dual = r * (s.dt_v1 + s.v2 - s.work_n).norm();
        const double lifted = std::sqrt(edges.du_sq + s.u.squaredNorm());
        const double copies = std::sqrt(edges.v_sq + s.v2.squaredNorm());
        res.relative_primal = res.primal / detail::safe_scale(lifted, copies);
        res.relative_dual = res.dual / detail::safe_scale(r * (s.dt_z1 + s.z2).norm());
        return res;
    }

    const Matrix& primal(const State& s) const { return s.u; }

    void finish(const State& s, SolveReport& report) const {
        report.u = s.u;
        report.fusion_copy = s.v1;
        report.sparse_copy = s.v2;
    }

    SolveReport solve(const SolverConfig& config, const IterationObserver& observer = {}) const {
        State s = init();
        return detail::run_solver(*this, spec_, config, s, observer);
    }

private:
    const ProblemSpec& spec_;
    std::shared_ptr<const SpdFactorization> factor_;
};

inline SolveReport cb_admm_solve(const ProblemSpec& spec, const SolverConfig& config,
                                 const IterationObserver& observer = {},
                                 FactorizationCache* cache = nullptr) {
    spec.validate();
    const double rho = config.rho.value_or(1.0);
    if (!(rho > 0.0)) throw InvalidConfig("rho must be positive");
    auto factor = cache ? cache->get(spec.d, rho) : std::make_shared<const SpdFactorization>(spec.d, rho);
    SolverConfig cfg = config;
    cfg.solver = SolverKind::CbAdmm;
    return CbAdmm(spec, std::move(factor)).solve(cfg, observer);
}

}  // namespace waveclust
