#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "errors.hpp"

namespace disc {

enum class KernelKind { rbf_self_tuning, rbf_fixed };

struct KernelSpec {
    KernelKind kind = KernelKind::rbf_self_tuning;
    int knn_k = 0;        // 0 means ceil(log p)
    double epsilon = 1.0; // fixed-bandwidth kernels only
};

struct FeatureGraph {
    Eigen::MatrixXd weights; // symmetric affinity, unit diagonal
    Eigen::VectorXd degrees;
    Eigen::MatrixXd rw; // row-stochastic D^-1 W
};

inline int default_knn(Eigen::Index p) {
    return static_cast<int>(std::ceil(std::log(static_cast<double>(p))));
}

inline Eigen::MatrixXd zscore_columns(const Eigen::MatrixXd& x) {
    Eigen::MatrixXd out = x;
    const double n = static_cast<double>(x.rows());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const double mean = x.col(j).mean();
        out.col(j).array() -= mean;
        const double sd = std::sqrt(out.col(j).squaredNorm() / n);
        if (sd > 0.0) out.col(j) /= sd;
    }
    return out;
}

// squared Euclidean distances between feature columns, accumulated one pair at
// a time; a blocked matrix product would round differently per output position
// and break exact equivariance under column relabeling
inline Eigen::MatrixXd pairwise_sq_dists(const Eigen::MatrixXd& x) {
    const Eigen::Index p = x.cols();
    Eigen::VectorXd sq = x.colwise().squaredNorm();
    Eigen::MatrixXd d2(p, p);
    d2.diagonal().setZero();
    for (Eigen::Index i = 0; i < p; ++i)
        for (Eigen::Index j = i + 1; j < p; ++j) {
            const double v = std::max(0.0, sq(i) + sq(j) - 2.0 * x.col(i).dot(x.col(j)));
            d2(i, j) = v;
            d2(j, i) = v;
        }
    return d2;
}

inline Eigen::VectorXd self_tuning_sigmas(const Eigen::MatrixXd& d2, int k) {
    const Eigen::Index p = d2.rows();
    if (k < 1 || k >= p)
        throw ValidationError("knn_k must be in [1, p-1], got " + std::to_string(k) +
                              " for p=" + std::to_string(p));
    Eigen::VectorXd sigma(p);
    std::vector<double> dists(static_cast<std::size_t>(p) - 1);
    for (Eigen::Index i = 0; i < p; ++i) {
        std::size_t m = 0;
        for (Eigen::Index j = 0; j < p; ++j)
            if (j != i) dists[m++] = std::sqrt(d2(i, j));
        std::nth_element(dists.begin(), dists.begin() + (k - 1), dists.end());
        double s = dists[k - 1];
        if (s == 0.0) {
            double smallest_pos = 0.0;
            for (double d : dists)
                if (d > 0.0 && (smallest_pos == 0.0 || d < smallest_pos)) smallest_pos = d;
            if (smallest_pos == 0.0)
                throw NumericError("degenerate input: feature " + std::to_string(i) +
                                   " is identical to every other feature");
            s = smallest_pos;
        }
        sigma(i) = s;
    }
    return sigma;
}

inline Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& x, const KernelSpec& spec) {
    const Eigen::Index p = x.cols();
    if (p < 2) throw ValidationError("need at least 2 features");
    Eigen::MatrixXd d2 = pairwise_sq_dists(x);
    Eigen::MatrixXd w(p, p);
    w.diagonal().setOnes();

    if (spec.kind == KernelKind::rbf_self_tuning) {
        const int k = spec.knn_k > 0 ? spec.knn_k : default_knn(p);
        Eigen::VectorXd sigma = self_tuning_sigmas(d2, k);
        for (Eigen::Index i = 0; i < p; ++i)
            for (Eigen::Index j = i + 1; j < p; ++j) {
                const double v = std::exp(-d2(i, j) / (sigma(i) * sigma(j)));
                w(i, j) = v;
                w(j, i) = v;
            }
    } else {
        if (!(spec.epsilon > 0.0)) throw ValidationError("epsilon must be positive");
        const double inv = 1.0 / (spec.epsilon * spec.epsilon);
        for (Eigen::Index i = 0; i < p; ++i)
            for (Eigen::Index j = i + 1; j < p; ++j) {
                const double v = std::exp(-d2(i, j) * inv);
                w(i, j) = v;
                w(j, i) = v;
            }
    }
    return w;
}

// row sums accumulated in sorted order, so relabeling features permutes degrees bitwise
inline Eigen::VectorXd degree_sums(const Eigen::MatrixXd& w) {
    Eigen::VectorXd d(w.rows());
    std::vector<double> row(static_cast<std::size_t>(w.cols()));
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
        for (Eigen::Index j = 0; j < w.cols(); ++j) row[static_cast<std::size_t>(j)] = w(i, j);
        std::sort(row.begin(), row.end());
        double s = 0.0;
        for (double v : row) s += v;
        d(i) = s;
    }
    return d;
}

inline FeatureGraph build_graph(const Eigen::MatrixXd& x, const KernelSpec& spec) {
    FeatureGraph g;
    g.weights = kernel_matrix(x, spec);
    g.degrees = degree_sums(g.weights);
    g.rw = g.degrees.cwiseInverse().asDiagonal() * g.weights;
    return g;
}

inline FeatureGraph graph_from_weights(Eigen::MatrixXd w) {
    FeatureGraph g;
    g.weights = std::move(w);
    g.degrees = degree_sums(g.weights);
    for (Eigen::Index i = 0; i < g.degrees.size(); ++i)
        if (!(g.degrees(i) > 0.0))
            throw NumericError("node " + std::to_string(i) + " has non-positive degree");
    g.rw = g.degrees.cwiseInverse().asDiagonal() * g.weights;
    return g;
}

} // namespace disc
