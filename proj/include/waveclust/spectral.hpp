#pragma once

#include "waveclust/matrix.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

namespace waveclust {

struct PowerIterationResult {
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Largest eigenvalue of D^T D by power iteration from a fixed pseudo-random
// start. Stops when the Rayleigh quotient changes by less than tol
// (relative).
inline PowerIterationResult power_iteration_gram(const SparseMatrix& d, double tol = 1e-10,
                                                 int max_iters = 1000) {
    PowerIterationResult out;
    const Eigen::Index n = d.cols();
    if (n == 0 || d.rows() == 0) {
        out.converged = true;
        return out;
    }
    std::mt19937_64 rng(0x5eed);
    std::uniform_real_distribution<double> unif(0.5, 1.5);
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = (i % 2 == 0 ? 1.0 : -1.0) * unif(rng);
    v.normalize();
    double prev = 0.0;
    for (int it = 1; it <= max_iters; ++it) {
        Vector w = d.transpose() * (d * v);
        const double rq = v.dot(w);
        const double norm = w.norm();
        out.iterations = it;
        if (norm == 0.0) {
            out.value = 0.0;
            out.converged = true;
            return out;
        }
        v = w / norm;
        out.value = rq;
        if (it > 1 && std::abs(rq - prev) <= tol * std::abs(rq)) {
            out.converged = true;
            return out;
        }
        prev = rq;
    }
    return out;
}

// lambda_max(D^T D). Power iteration first; when it stalls (small spectral
// gap) and the problem is small enough, a dense symmetric eigensolve.
inline double max_eigenvalue_gram(const SparseMatrix& d) {
    const auto power = power_iteration_gram(d);
    if (power.converged || d.cols() > 2048) return power.value;
    const Matrix gram = Matrix(d.transpose() * d);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().maxCoeff();
}

}  // namespace waveclust
