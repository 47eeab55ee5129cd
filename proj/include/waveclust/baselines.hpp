#pragma once

// Comparison methods: naive and sequential combinations of K-means, convex
// clustering (gamma = 0) and universal-threshold denoising, plus the joint
// method itself.

#include "waveclust/denoise.hpp"
#include "waveclust/kmeans.hpp"
#include "waveclust/pipeline.hpp"

#include <string_view>

namespace waveclust {

enum class Method { KM, CC, D_KM, D_CC, KM_D, CC_D, CWC };

inline constexpr std::array kAllMethods = {Method::KM,   Method::CC,   Method::D_KM, Method::D_CC,
                                           Method::KM_D, Method::CC_D, Method::CWC};

inline std::string_view method_name(Method m) {
    switch (m) {
        case Method::KM: return "KM";
        case Method::CC: return "CC";
        case Method::D_KM: return "D+KM";
        case Method::D_CC: return "D+CC";
        case Method::KM_D: return "KM+D";
        case Method::CC_D: return "CC+D";
        case Method::CWC: return "CWC";
    }
    return "unknown";
}

struct BaselineParams {
    int k = 0;                 // clusters for K-means (required by KM methods)
    double lambda = 0.0;       // fusion level for CC methods and CWC
    double gamma = 0.0;        // sparsity level for CWC
    PrepareOptions prepare;    // kNN graph settings
    KMeansOptions kmeans;
    SolverConfig solver;
};

namespace detail {

// Wraps per-sample wavelet-domain centroids. Working on coefficients keeps
// thresholded entries exactly zero.
inline ClusteringResult from_coefficients(Matrix per_sample, Labels labels, const WaveletBasis& basis,
                                          const CoefficientLayout& layout) {
    ClusteringResult out;
    out.labels = std::move(labels);
    out.cluster_count = count_clusters(out.labels);
    out.centroids_wavelet = std::move(per_sample);
    out.support_mask = column_support(out.centroids_wavelet);
    out.centroids = truncate_rows(transform_rows(out.centroids_wavelet, basis, TransformDirection::Inverse), layout);
    out.layout = layout;
    out.report.converged = true;
    return out;
}

inline ClusteringResult kmeans_on(const Matrix& coeffs, const WaveletBasis& basis, const CoefficientLayout& layout,
                                  const BaselineParams& params) {
    detail::require(params.k >= 1, "K-means baselines need k >= 1");
    const auto km = kmeans(coeffs, params.k, params.kmeans);
    return from_coefficients(per_sample_centroids(km), km.labels, basis, layout);
}

// Thresholds the distinct estimated centroids and rebuilds the result.
inline ClusteringResult denoise_centroids(ClusteringResult r, const WaveletBasis& basis) {
    const Matrix distinct = cluster_centroids(r.centroids_wavelet, r.labels);
    const Matrix cleaned = denoise_coefficients(distinct, basis).coefficients;
    Matrix per_sample(r.centroids_wavelet.rows(), r.centroids_wavelet.cols());
    for (std::size_t i = 0; i < r.labels.size(); ++i) per_sample.row(static_cast<Eigen::Index>(i)) = cleaned.row(r.labels[i]);
    auto out = from_coefficients(std::move(per_sample), std::move(r.labels), basis, r.layout);
    out.report = std::move(r.report);
    out.objective = r.objective;
    return out;
}

}  // namespace detail

// Runs one method on raw (unpadded) X. Everything happens on wavelet
// coefficients; by orthogonality K-means and the gamma = 0 solve give the
// same partitions as in the time domain. Convex clustering methods build
// their kNN graph on the signals they cluster (raw or denoised).
inline ClusteringResult baseline_pipeline(const Matrix& x, const WaveletBasis& basis, Method method,
                                          const BaselineParams& params) {
    detail::require(x.allFinite(), "input contains non-finite values");
    const auto pad = pad_rows(x, basis, params.prepare.pad);
    const auto& layout = pad.layout;
    const Matrix xstar = transform_rows(pad.values, basis, TransformDirection::Forward);
    auto convex = [&](const Matrix& coeffs, double gamma) {
        return cluster_prepared(prepare_coefficients(coeffs, basis, layout, params.prepare), params.lambda, gamma,
                                params.solver);
    };
    auto denoised = [&] { return denoise_coefficients(xstar, basis).coefficients; };
    switch (method) {
        case Method::KM: return detail::kmeans_on(xstar, basis, layout, params);
        case Method::D_KM: return detail::kmeans_on(denoised(), basis, layout, params);
        case Method::KM_D: return detail::denoise_centroids(detail::kmeans_on(xstar, basis, layout, params), basis);
        case Method::CC: return convex(xstar, 0.0);
        case Method::D_CC: return convex(denoised(), 0.0);
        case Method::CC_D: return detail::denoise_centroids(convex(xstar, 0.0), basis);
        case Method::CWC: return convex(xstar, params.gamma);
    }
    throw InvalidConfig("unknown method");
}

}  // namespace waveclust
