#pragma once

// Fusion graph construction: sparse Gaussian k-NN weights, variance-based
// sparsity weights, the directed difference matrix D and its full row-rank
// reduction.

#include "waveclust/error.hpp"
#include "waveclust/matrix.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace waveclust {

struct Edge {
    int i = 0;
    int j = 0;
    double weight = 0.0;

    friend bool operator==(const Edge&, const Edge&) = default;
};

// Undirected weighted graph over the n observations. Edges satisfy i < j,
// weight > 0 and are kept in lexicographic (i, j) order.
struct FusionGraph {
    int n = 0;
    std::vector<Edge> edges;

    std::size_t edge_count() const { return edges.size(); }

    Vector weights() const {
        Vector w(static_cast<Eigen::Index>(edges.size()));
        for (std::size_t e = 0; e < edges.size(); ++e) w[static_cast<Eigen::Index>(e)] = edges[e].weight;
        return w;
    }
};

namespace detail {

class DisjointSets {
public:
    explicit DisjointSets(int n) : parent_(static_cast<std::size_t>(n)) {
        std::iota(parent_.begin(), parent_.end(), 0);
    }

    int find(int x) {
        while (parent_[static_cast<std::size_t>(x)] != x) {
            auto& p = parent_[static_cast<std::size_t>(x)];
            p = parent_[static_cast<std::size_t>(p)];
            x = p;
        }
        return x;
    }

    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        if (b < a) std::swap(a, b);
        parent_[static_cast<std::size_t>(b)] = a;
        return true;
    }

private:
    std::vector<int> parent_;
};

inline Matrix pairwise_sq_distances(const Matrix& x) {
    const Eigen::Index n = x.rows();
    Matrix d = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double v = (x.row(i) - x.row(j)).squaredNorm();
            d(i, j) = v;
            d(j, i) = v;
        }
    }
    return d;
}

inline double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    double m = v[mid];
    if (v.size() % 2 == 0) {
        const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
        m = 0.5 * (m + lower);
    }
    return m;
}

inline double gaussian_weight(double phi, double sq_dist) {
    return std::max(std::exp(-phi * sq_dist), std::numeric_limits<double>::min());
}

}  // namespace detail

inline int default_knn(int n) { return n <= 5 ? std::max(n - 1, 1) : 5; }

// Median heuristic: 1 / median pairwise squared distance (1 when all rows
// coincide).
inline double auto_phi(const Matrix& x) {
    const Matrix d = detail::pairwise_sq_distances(x);
    std::vector<double> vals;
    for (Eigen::Index i = 0; i < d.rows(); ++i)
        for (Eigen::Index j = i + 1; j < d.cols(); ++j) vals.push_back(d(i, j));
    const double med = detail::median_of(std::move(vals));
    return med > 0.0 ? 1.0 / med : 1.0;
}

// w_ij = exp(-phi ||X_i - X_j||^2), kept when j is among the k nearest
// neighbours of i or vice versa. If the k-NN graph is disconnected, the
// minimum spanning tree over all pairs is merged in.
inline FusionGraph gaussian_knn_weights(const Matrix& x, int k, std::optional<double> phi = {}) {
    const int n = static_cast<int>(x.rows());
    if (n < 2) throw InvalidInput("gaussian_knn_weights: need at least 2 observations");
    if (k < 1 || k > n - 1) {
        throw InvalidInput("gaussian_knn_weights: k must be in [1, " + std::to_string(n - 1) +
                           "], got " + std::to_string(k));
    }
    if (phi && !(*phi > 0.0)) throw InvalidInput("gaussian_knn_weights: phi must be positive");

    const Matrix d = detail::pairwise_sq_distances(x);
    const double scale = phi ? *phi : auto_phi(x);

    std::set<std::pair<int, int>> keep;
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return d(i, a) < d(i, b); });
        int taken = 0;
        for (int j : order) {
            if (j == i) continue;
            keep.emplace(std::min(i, j), std::max(i, j));
            if (++taken == k) break;
        }
    }

    detail::DisjointSets components(n);
    int merges = 0;
    for (const auto& [i, j] : keep) merges += components.unite(i, j) ? 1 : 0;

    if (merges < n - 1) {
        // Kruskal over all pairs by increasing distance (= decreasing weight).
        std::vector<std::pair<int, int>> pairs;
        pairs.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
        std::stable_sort(pairs.begin(), pairs.end(), [&](const auto& a, const auto& b) {
            return d(a.first, a.second) < d(b.first, b.second);
        });
        detail::DisjointSets tree(n);
        for (const auto& [i, j] : pairs) {
            if (tree.unite(i, j)) keep.emplace(i, j);
        }
    }

    FusionGraph graph;
    graph.n = n;
    graph.edges.reserve(keep.size());
    for (const auto& [i, j] : keep) graph.edges.push_back({i, j, detail::gaussian_weight(scale, d(i, j))});
    return graph;
}

inline bool is_connected(const FusionGraph& graph) {
    if (graph.n <= 1) return true;
    detail::DisjointSets sets(graph.n);
    int merges = 0;
    for (const auto& e : graph.edges) merges += sets.unite(e.i, e.j) ? 1 : 0;
    return merges == graph.n - 1;
}

// Checks the FusionGraph invariants; throws InvalidInput on violation.
inline void validate_graph(const FusionGraph& graph) {
    detail::require(graph.n >= 1, "fusion graph needs at least one node");
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
        const auto& edge = graph.edges[e];
        detail::require(edge.i >= 0 && edge.i < edge.j && edge.j < graph.n,
                        "fusion graph edge indices must satisfy 0 <= i < j < n");
        detail::require(edge.weight > 0.0 && std::isfinite(edge.weight),
                        "fusion graph weights must be positive and finite");
        if (e > 0) {
            const auto& prev = graph.edges[e - 1];
            detail::require(std::pair(prev.i, prev.j) < std::pair(edge.i, edge.j),
                            "fusion graph edges must be unique and lexicographically ordered");
        }
    }
}

// omega_j = 1 - zeta_j / ||zeta||_1 with zeta_j the sample variance (divisor
// n - 1) of column j. Uniform weights of 1 when every column is constant.
inline Vector variance_sparsity_weights(const Matrix& xstar) {
    if (xstar.rows() < 2) throw InvalidInput("variance_sparsity_weights: need at least 2 rows");
    const double denom = static_cast<double>(xstar.rows() - 1);
    const RowVector mean = xstar.colwise().mean();
    Vector zeta(xstar.cols());
    for (Eigen::Index j = 0; j < xstar.cols(); ++j) {
        zeta[j] = (xstar.col(j).array() - mean[j]).square().sum() / denom;
    }
    const double total = zeta.sum();
    if (!(total > 0.0)) return Vector::Ones(xstar.cols());
    return (1.0 - zeta.array() / total).max(0.0).matrix();
}

// One row per edge: +1 at column i, -1 at column j, so (D U)_e = U_i - U_j.
inline SparseMatrix difference_matrix(const FusionGraph& graph) {
    validate_graph(graph);
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(graph.edges.size() * 2);
    for (std::size_t e = 0; e < graph.edges.size(); ++e) {
        const auto row = static_cast<int>(e);
        triplets.emplace_back(row, graph.edges[e].i, 1.0);
        triplets.emplace_back(row, graph.edges[e].j, -1.0);
    }
    SparseMatrix d(static_cast<Eigen::Index>(graph.edges.size()), graph.n);
    d.setFromTriplets(triplets.begin(), triplets.end());
    d.makeCompressed();
    return d;
}

struct RankReduction {
    SparseMatrix reduced;          // rank(D) rows of D spanning its row space
    std::vector<int> kept_rows;    // indices into the rows of D, ascending
    int rank = 0;

    bool is_identity(Eigen::Index original_rows) const {
        return static_cast<Eigen::Index>(kept_rows.size()) == original_rows;
    }

    // Restricts a per-row vector (e.g. fusion weights) to the kept rows.
    Vector select(const Vector& per_row) const {
        Vector out(static_cast<Eigen::Index>(kept_rows.size()));
        for (std::size_t r = 0; r < kept_rows.size(); ++r)
            out[static_cast<Eigen::Index>(r)] = per_row[kept_rows[r]];
        return out;
    }
};

// Full row-rank reduction via column-pivoted QR of D^T: the pivot columns
// of D^T pick a maximal linearly independent subset of the rows of D.
inline RankReduction rank_reduce(const SparseMatrix& d) {
    detail::require(d.rows() >= 1, "rank_reduce: D must have at least one row");
    const Matrix dt = Matrix(d).transpose();
    Eigen::ColPivHouseholderQR<Matrix> qr(dt);
    qr.setThreshold(1e-10);
    RankReduction out;
    out.rank = static_cast<int>(qr.rank());
    const auto& perm = qr.colsPermutation().indices();
    for (int r = 0; r < out.rank; ++r) out.kept_rows.push_back(perm[r]);
    std::sort(out.kept_rows.begin(), out.kept_rows.end());

    std::vector<Eigen::Triplet<double>> triplets;
    const Eigen::SparseMatrix<double, Eigen::RowMajor> rows(d);
    for (std::size_t r = 0; r < out.kept_rows.size(); ++r) {
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(rows, out.kept_rows[r]); it; ++it) {
            triplets.emplace_back(static_cast<int>(r), static_cast<int>(it.col()), it.value());
        }
    }
    out.reduced.resize(static_cast<Eigen::Index>(out.kept_rows.size()), d.cols());
    out.reduced.setFromTriplets(triplets.begin(), triplets.end());
    out.reduced.makeCompressed();
    return out;
}

}  // namespace waveclust
