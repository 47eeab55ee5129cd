#pragma once

// End-to-end sparse convex wavelet clustering: transform rows, solve the
// sparse convex clustering problem on the coefficients, read clusters off the
// exact zeros of the fusion copy, then transform the centroids back.

#include "waveclust/eval.hpp"
#include "waveclust/graph.hpp"
#include "waveclust/parallel.hpp"
#include "waveclust/problem.hpp"
#include "waveclust/solve.hpp"
#include "waveclust/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace waveclust {

struct ClusteringResult {
    Matrix centroids;          // n x T, time domain (padding removed)
    Matrix centroids_wavelet;  // n x T_pad
    Labels labels;
    int cluster_count = 0;
    SupportMask support_mask;  // T_pad, nonzero columns of centroids_wavelet
    double objective = 0.0;    // solver objective at its primal iterate
    double fusion_threshold = 0.0;  // V1 row norm at or below which an edge counts as fused
    SolveReport report;
    CoefficientLayout layout;
};

// Edge e is fused when row e of V1 has norm <= tol (tol = 0: exactly zero).
// Labels are connected components of the fused subgraph, numbered in order
// of first appearance.
inline Labels extract_clusters(const Matrix& v1, const FusionGraph& graph, double tol = 0.0) {
    detail::require(v1.rows() == static_cast<Eigen::Index>(graph.edges.size()),
                    "extract_clusters: V1 needs one row per edge");
    detail::require(tol >= 0.0, "extract_clusters: tolerance must be >= 0");
    detail::DisjointSets sets(graph.n);
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
        if (v1.row(static_cast<Eigen::Index>(e)).norm() <= tol) sets.unite(graph.edges[e].i, graph.edges[e].j);
    }
    Labels labels(static_cast<std::size_t>(graph.n), -1);
    std::vector<int> root_label(static_cast<std::size_t>(graph.n), -1);
    int next = 0;
    for (int i = 0; i < graph.n; ++i) {
        auto& slot = root_label[static_cast<std::size_t>(sets.find(i))];
        if (slot < 0) slot = next++;
        labels[static_cast<std::size_t>(i)] = slot;
    }
    return labels;
}

inline int count_clusters(const Labels& labels) {
    return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
}

// Replaces the rows of each cluster by their mean. Columns that are entirely
// zero stay exactly zero, so wavelet support is preserved.
inline Matrix consolidate_rows(const Matrix& u, const Labels& labels) {
    detail::require(u.rows() == static_cast<Eigen::Index>(labels.size()), "consolidate_rows: label count mismatch");
    const int k = count_clusters(labels);
    Matrix sums = Matrix::Zero(k, u.cols());
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        sums.row(labels[i]) += u.row(static_cast<Eigen::Index>(i));
        ++counts[static_cast<std::size_t>(labels[i])];
    }
    const SupportMask support = column_support(u);
    Matrix out(u.rows(), u.cols());
    for (std::size_t i = 0; i < labels.size(); ++i)
        out.row(static_cast<Eigen::Index>(i)) = sums.row(labels[i]) / counts[static_cast<std::size_t>(labels[i])];
    for (Eigen::Index j = 0; j < u.cols(); ++j)
        if (!support[static_cast<std::size_t>(j)]) out.col(j).setZero();
    return out;
}

// Fused edges of a cycle share their dual variables non-uniquely, and the
// iterates can settle on a boundary point where prox leaves a row of size
// ~tol instead of an exact zero. Rows of V1 within this fraction of the
// largest row of D X are therefore treated as fused.
inline constexpr double kDefaultFusionRelTol = 1e-5;

inline double fusion_threshold(const Matrix& x, const SparseMatrix& d, double rel_tol) {
    if (d.rows() == 0) return 0.0;
    const Matrix dx = d * x;
    return rel_tol * std::sqrt(dx.rowwise().squaredNorm().maxCoeff());
}

inline ProblemSpec make_problem_spec(const Matrix& x, double lambda, double gamma, const FusionGraph& graph,
                                     const Vector& omega) {
    detail::require(graph.n == x.rows(), "fusion graph must have one node per row of X");
    ProblemSpec spec;
    spec.x = x;
    spec.d = difference_matrix(graph);
    spec.lambda = lambda;
    spec.gamma = gamma;
    spec.fusion_weights = graph.weights();
    spec.sparsity_weights = omega;
    return spec;
}

// Sparse convex clustering in the coordinates X is given in.
inline ClusteringResult sparse_convex_cluster(const Matrix& x, double lambda, double gamma, const FusionGraph& graph,
                                              const Vector& omega, const SolverConfig& config,
                                              FactorizationCache* cache = nullptr,
                                              double fusion_rel_tol = kDefaultFusionRelTol) {
    const ProblemSpec spec = make_problem_spec(x, lambda, gamma, graph, omega);

    ClusteringResult out;
    out.report = solve(spec, config, {}, cache);
    out.objective = out.report.objective;
    out.fusion_threshold = fusion_threshold(x, spec.d, fusion_rel_tol);
    out.labels = extract_clusters(out.report.fusion_copy, graph, out.fusion_threshold);
    out.cluster_count = count_clusters(out.labels);
    out.centroids_wavelet = consolidate_rows(out.report.sparse_copy, out.labels);
    out.support_mask = column_support(out.centroids_wavelet);
    out.centroids = out.centroids_wavelet;
    const auto len = static_cast<std::size_t>(x.cols());
    out.layout.original_length = len;
    out.layout.padded_length = len;
    return out;
}

// X rows must have power-of-two length. Because the transform is orthogonal
// and the fusion penalty is an l2 norm of row differences, solving in the
// coefficient domain and transforming back solves the time-domain problem
// with the sparsity penalty placed on wavelet coefficients.
inline ClusteringResult wavelet_sparse_convex_cluster(const Matrix& x, const WaveletBasis& basis, double lambda,
                                                      double gamma, const FusionGraph& graph, const Vector& omega,
                                                      const SolverConfig& config, FactorizationCache* cache = nullptr,
                                                      double fusion_rel_tol = kDefaultFusionRelTol) {
    const auto len = static_cast<std::size_t>(x.cols());
    const int levels = basis.resolved_levels(len);
    const Matrix xstar = transform_rows(x, basis, TransformDirection::Forward);
    auto out = sparse_convex_cluster(xstar, lambda, gamma, graph, omega, config, cache, fusion_rel_tol);
    out.centroids = transform_rows(out.centroids_wavelet, basis, TransformDirection::Inverse);
    out.layout = make_layout(len, len, levels);
    return out;
}

// Data prepared once per (X, basis, graph settings): transformed rows,
// Gaussian kNN fusion graph and variance sparsity weights, all computed on
// the wavelet coefficients.
struct PreparedSignals {
    WaveletBasis basis;
    CoefficientLayout layout;
    Matrix xstar;  // n x T_pad, wavelet domain
    FusionGraph graph;
    Vector omega;
    double phi = 0.0;
    int knn = 0;
};

struct PrepareOptions {
    std::optional<int> knn;
    std::optional<double> phi;
    PadMode pad = PadMode::Zero;
};

// `xstar` holds wavelet coefficients of signals padded as `layout` records.
inline PreparedSignals prepare_coefficients(Matrix xstar, const WaveletBasis& basis, const CoefficientLayout& layout,
                                            const PrepareOptions& opt = {}) {
    detail::require(xstar.rows() >= 2, "need at least two signals");
    detail::require(xstar.allFinite(), "input contains non-finite values");
    detail::require(static_cast<std::size_t>(xstar.cols()) == layout.padded_length,
                    "coefficient count does not match the padded length");
    PreparedSignals p;
    p.basis = basis;
    p.layout = layout;
    p.xstar = std::move(xstar);
    p.knn = opt.knn.value_or(default_knn(static_cast<int>(p.xstar.rows())));
    p.phi = opt.phi.value_or(auto_phi(p.xstar));
    p.graph = gaussian_knn_weights(p.xstar, p.knn, p.phi);
    p.omega = variance_sparsity_weights(p.xstar);
    return p;
}

inline PreparedSignals prepare_signals(const Matrix& x, const WaveletBasis& basis, const PrepareOptions& opt = {}) {
    detail::require(x.allFinite(), "input contains non-finite values");
    auto padded = pad_rows(x, basis, opt.pad);
    return prepare_coefficients(transform_rows(padded.values, basis, TransformDirection::Forward), basis,
                                padded.layout, opt);
}

// Solves on prepared signals and truncates the centroids to the original
// length.
inline ClusteringResult cluster_prepared(const PreparedSignals& p, double lambda, double gamma,
                                         const SolverConfig& config, FactorizationCache* cache = nullptr,
                                         double fusion_rel_tol = kDefaultFusionRelTol) {
    auto out = sparse_convex_cluster(p.xstar, lambda, gamma, p.graph, p.omega, config, cache, fusion_rel_tol);
    out.centroids = truncate_rows(transform_rows(out.centroids_wavelet, p.basis, TransformDirection::Inverse), p.layout);
    out.layout = p.layout;
    return out;
}

inline Matrix normalize_total_power(const Matrix& x, double target) {
    detail::require(target >= 0.0 && std::isfinite(target), "normalize_total_power: target must be finite and >= 0");
    Matrix out = x;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const double power = x.row(i).squaredNorm();
        if (!(power > 0.0)) throw InvalidInput("normalize_total_power: row " + std::to_string(i) + " is zero");
        out.row(i) *= std::sqrt(target / power);
    }
    return out;
}

// --- grid search -----------------------------------------------------------

struct GridPoint {
    double lambda = 0.0;
    double gamma = 0.0;
    double ari = std::numeric_limits<double>::quiet_NaN();
    int clusters = 0;
    double objective = 0.0;
    double compression = 0.0;
    bool converged = false;
    int iterations = 0;
};

struct GridSearchResult {
    std::vector<GridPoint> points;  // lambda-major order
    std::size_t best = 0;
    ClusteringResult result;        // at points[best]
};

// Linear grid of `count` points from start to stop inclusive.
inline std::vector<double> linear_grid(double start, double stop, int count) {
    detail::require(count >= 1, "grid needs at least one point");
    detail::require(std::isfinite(start) && std::isfinite(stop), "grid bounds must be finite");
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        out[static_cast<std::size_t>(i)] = count == 1 ? start : start + (stop - start) * i / (count - 1);
    return out;
}

// Geometric grid; both ends must be positive.
inline std::vector<double> log_grid(double start, double stop, int count) {
    detail::require(start > 0.0 && stop > 0.0, "log grid bounds must be positive");
    auto out = linear_grid(std::log(start), std::log(stop), count);
    for (auto& v : out) v = std::exp(v);
    out.front() = start;
    out.back() = stop;
    return out;
}

// Among points sharing the best ARI, picks the middle one in (gamma, lambda)
// order so the choice sits inside the optimal region rather than on its edge.
inline std::size_t pick_oracle_point(const std::vector<GridPoint>& points) {
    detail::require(!points.empty(), "empty grid");
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& p : points) best = std::max(best, p.ari);
    std::vector<std::size_t> tied;
    for (std::size_t i = 0; i < points.size(); ++i)
        if (points[i].ari == best) tied.push_back(i);
    std::stable_sort(tied.begin(), tied.end(), [&](std::size_t a, std::size_t b) {
        return std::pair(points[a].gamma, points[a].lambda) < std::pair(points[b].gamma, points[b].lambda);
    });
    return tied[(tied.size() - 1) / 2];
}

// Oracle tuning: evaluates every (lambda, gamma) pair and keeps the one
// maximizing ARI against `truth`. Deterministic for any `jobs`.
inline GridSearchResult oracle_grid_search(const PreparedSignals& p, const std::vector<double>& lambdas,
                                           const std::vector<double>& gammas, const Labels& truth,
                                           const SolverConfig& config, int jobs = 1) {
    detail::require(!lambdas.empty() && !gammas.empty(), "grids must be nonempty");
    detail::require(truth.size() == static_cast<std::size_t>(p.xstar.rows()), "need one true label per signal");
    GridSearchResult out;
    for (double l : lambdas)
        for (double g : gammas) out.points.push_back({l, g});
    FactorizationCache cache;
    parallel_for(out.points.size(), jobs, [&](std::size_t i) {
        auto& pt = out.points[i];
        const auto r = cluster_prepared(p, pt.lambda, pt.gamma, config, &cache);
        pt.ari = adjusted_rand_index(truth, r.labels);
        pt.clusters = r.cluster_count;
        pt.objective = r.objective;
        pt.compression = compression(r.centroids_wavelet);
        pt.converged = r.report.converged;
        pt.iterations = r.report.iterations;
    });
    out.best = pick_oracle_point(out.points);
    out.result = cluster_prepared(p, out.points[out.best].lambda, out.points[out.best].gamma, config, &cache);
    return out;
}

// --- centroid alignment ------------------------------------------------------

// Minimum-cost assignment for a rows x cols cost matrix with rows <= cols
// (shortest augmenting path). Returns the column assigned to each row.
inline std::vector<int> hungarian(const Matrix& cost) {
    const auto n = static_cast<int>(cost.rows());
    const auto m = static_cast<int>(cost.cols());
    detail::require(n <= m, "hungarian: need rows <= cols");
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(static_cast<std::size_t>(n + 1), 0.0);
    std::vector<double> v(static_cast<std::size_t>(m + 1), 0.0);
    std::vector<int> match(static_cast<std::size_t>(m + 1), 0);  // column -> row (1-based)
    std::vector<int> way(static_cast<std::size_t>(m + 1), 0);
    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<double> minv(static_cast<std::size_t>(m + 1), inf);
        std::vector<bool> used(static_cast<std::size_t>(m + 1), false);
        do {
            used[static_cast<std::size_t>(j0)] = true;
            const int i0 = match[static_cast<std::size_t>(j0)];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= m; ++j) {
                if (used[static_cast<std::size_t>(j)]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
                if (cur < minv[static_cast<std::size_t>(j)]) {
                    minv[static_cast<std::size_t>(j)] = cur;
                    way[static_cast<std::size_t>(j)] = j0;
                }
                if (minv[static_cast<std::size_t>(j)] < delta) {
                    delta = minv[static_cast<std::size_t>(j)];
                    j1 = j;
                }
            }
            for (int j = 0; j <= m; ++j) {
                if (used[static_cast<std::size_t>(j)]) {
                    u[static_cast<std::size_t>(match[static_cast<std::size_t>(j)])] += delta;
                    v[static_cast<std::size_t>(j)] -= delta;
                } else {
                    minv[static_cast<std::size_t>(j)] -= delta;
                }
            }
            j0 = j1;
        } while (match[static_cast<std::size_t>(j0)] != 0);
        do {
            const int j1 = way[static_cast<std::size_t>(j0)];
            match[static_cast<std::size_t>(j0)] = match[static_cast<std::size_t>(j1)];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<int> out(static_cast<std::size_t>(n), -1);
    for (int j = 1; j <= m; ++j)
        if (match[static_cast<std::size_t>(j)] > 0) out[static_cast<std::size_t>(match[static_cast<std::size_t>(j)] - 1)] = j - 1;
    return out;
}

inline double row_correlation(const RowVector& a, const RowVector& b) {
    const RowVector da = a.array() - a.mean();
    const RowVector db = b.array() - b.mean();
    const double denom = da.norm() * db.norm();
    return denom > 0.0 ? da.dot(db) / denom : 0.0;
}

// Pairs each reference centroid (row) with a distinct estimated centroid so
// the summed correlation is maximal. Returns, for every reference row, the
// index of its estimated row, or -1 when there are fewer estimates.
inline std::vector<int> align_centroids(const Matrix& reference, const Matrix& estimated) {
    detail::require(reference.cols() == estimated.cols(), "align_centroids: column counts differ");
    const bool transpose = reference.rows() > estimated.rows();
    const Matrix& a = transpose ? estimated : reference;
    const Matrix& b = transpose ? reference : estimated;
    Matrix cost(a.rows(), b.rows());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < b.rows(); ++j) cost(i, j) = -row_correlation(a.row(i), b.row(j));
    const auto assign = hungarian(cost);
    if (!transpose) return assign;
    std::vector<int> out(static_cast<std::size_t>(reference.rows()), -1);
    for (std::size_t i = 0; i < assign.size(); ++i) out[static_cast<std::size_t>(assign[i])] = static_cast<int>(i);
    return out;
}

// Distinct centroid rows, one per cluster label.
inline Matrix cluster_centroids(const Matrix& per_sample, const Labels& labels) {
    const int k = count_clusters(labels);
    Matrix out(k, per_sample.cols());
    for (std::size_t i = labels.size(); i-- > 0;) out.row(labels[i]) = per_sample.row(static_cast<Eigen::Index>(i));
    return out;
}

}  // namespace waveclust
