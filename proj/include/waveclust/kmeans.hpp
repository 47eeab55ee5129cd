#pragma once

// Lloyd's algorithm with k-means++ seeding, best of several restarts.

#include "waveclust/error.hpp"
#include "waveclust/matrix.hpp"

#include <cstdint>
#include <limits>
#include <random>

namespace waveclust {

struct KMeansOptions {
    int restarts = 20;
    int max_iters = 300;
    std::uint64_t seed = 0;
};

struct KMeansResult {
    Labels labels;
    Matrix centroids;  // k x T
    double wcss = 0.0;
    int iterations = 0;  // of the winning restart
};

namespace detail {

inline double row_sq_dist(const Matrix& a, Eigen::Index i, const Matrix& b, Eigen::Index j) {
    return (a.row(i) - b.row(j)).squaredNorm();
}

inline Matrix kmeanspp_seed(const Matrix& x, int k, std::mt19937_64& rng) {
    const Eigen::Index n = x.rows();
    Matrix c(k, x.cols());
    std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
    c.row(0) = x.row(first(rng));
    std::vector<double> d2(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) d2[static_cast<std::size_t>(i)] = row_sq_dist(x, i, c, 0);
    for (int m = 1; m < k; ++m) {
        double total = 0.0;
        for (double v : d2) total += v;
        Eigen::Index pick = 0;
        if (total > 0.0) {
            std::discrete_distribution<Eigen::Index> draw(d2.begin(), d2.end());
            pick = draw(rng);
        } else {
            pick = first(rng);
        }
        c.row(m) = x.row(pick);
        for (Eigen::Index i = 0; i < n; ++i) {
            d2[static_cast<std::size_t>(i)] = std::min(d2[static_cast<std::size_t>(i)], row_sq_dist(x, i, c, m));
        }
    }
    return c;
}

inline KMeansResult lloyd(const Matrix& x, Matrix centroids, int max_iters) {
    const Eigen::Index n = x.rows();
    const auto k = static_cast<int>(centroids.rows());
    KMeansResult r;
    r.labels.assign(static_cast<std::size_t>(n), -1);
    for (int it = 0; it < max_iters; ++it) {
        bool changed = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            int best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                const double d = row_sq_dist(x, i, centroids, c);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (r.labels[static_cast<std::size_t>(i)] != best) {
                r.labels[static_cast<std::size_t>(i)] = best;
                changed = true;
            }
        }
        r.iterations = it + 1;
        if (!changed && it > 0) break;

        Matrix sums = Matrix::Zero(k, x.cols());
        std::vector<int> counts(static_cast<std::size_t>(k), 0);
        for (Eigen::Index i = 0; i < n; ++i) {
            sums.row(r.labels[static_cast<std::size_t>(i)]) += x.row(i);
            ++counts[static_cast<std::size_t>(r.labels[static_cast<std::size_t>(i)])];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) {
                centroids.row(c) = sums.row(c) / counts[static_cast<std::size_t>(c)];
                continue;
            }
            // Empty cluster: move it to the point farthest from its centroid.
            Eigen::Index far = 0;
            double far_d = -1.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                const double d = row_sq_dist(x, i, centroids, r.labels[static_cast<std::size_t>(i)]);
                if (d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            centroids.row(c) = x.row(far);
            r.labels[static_cast<std::size_t>(far)] = c;
        }
    }
    r.centroids = std::move(centroids);
    r.wcss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) r.wcss += row_sq_dist(x, i, r.centroids, r.labels[static_cast<std::size_t>(i)]);
    return r;
}

}  // namespace detail

inline KMeansResult kmeans(const Matrix& x, int k, const KMeansOptions& options = {}) {
    if (k < 1 || k > x.rows()) {
        throw InvalidInput("kmeans: k must be in [1, n], got k = " + std::to_string(k) +
                           " with n = " + std::to_string(x.rows()));
    }
    detail::require(options.restarts >= 1 && options.max_iters >= 1, "kmeans: restarts and max_iters must be >= 1");
    detail::require(x.allFinite(), "kmeans: X contains non-finite values");
    std::mt19937_64 rng(options.seed);
    KMeansResult best;
    best.wcss = std::numeric_limits<double>::infinity();
    for (int r = 0; r < options.restarts; ++r) {
        auto run = detail::lloyd(x, detail::kmeanspp_seed(x, k, rng), options.max_iters);
        if (run.wcss < best.wcss) best = std::move(run);
    }
    return best;
}

// n x T matrix whose row i is the centroid assigned to observation i.
inline Matrix per_sample_centroids(const KMeansResult& r) {
    Matrix out(static_cast<Eigen::Index>(r.labels.size()), r.centroids.cols());
    for (std::size_t i = 0; i < r.labels.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = r.centroids.row(r.labels[i]);
    return out;
}

}  // namespace waveclust
