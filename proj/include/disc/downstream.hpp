#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "errors.hpp"
#include "rng.hpp"

namespace disc {

// index (1-based) of the largest consecutive drop
inline int significance_elbow(const Eigen::VectorXd& sigma) {
    if (sigma.size() == 0) throw ValidationError("empty significance vector");
    int best = 1;
    double best_drop = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i + 1 < sigma.size(); ++i) {
        const double drop = sigma(i) - sigma(i + 1);
        if (drop > best_drop) {
            best_drop = drop;
            best = static_cast<int>(i) + 1;
        }
    }
    if (sigma.size() == 1 || best_drop <= 0.0) return 1;
    return best;
}

struct KmeansResult {
    std::vector<int> labels;
    Eigen::MatrixXd centroids; // k x dim
    double inertia = 0.0;
};

namespace detail {

inline bool row_less(const Eigen::MatrixXd& x, Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        if (x(a, j) < x(b, j)) return true;
        if (x(a, j) > x(b, j)) return false;
    }
    return false;
}

inline double sq_dist_row(const Eigen::MatrixXd& x, Eigen::Index i, const Eigen::MatrixXd& c,
                          Eigen::Index ci) {
    return (x.row(i) - c.row(ci)).squaredNorm();
}

struct KmeansRun {
    std::vector<int> labels; // canonical order
    Eigen::MatrixXd centroids;
    double inertia;
};

inline KmeansRun kmeans_once(const Eigen::MatrixXd& xc, int k, Rng& rng, int max_iters,
                             double tol) {
    const Eigen::Index p = xc.rows();
    const Eigen::Index dim = xc.cols();

    Eigen::MatrixXd centroids(k, dim);
    centroids.row(0) = xc.row(static_cast<Eigen::Index>(rng.below(static_cast<uint64_t>(p))));
    std::vector<double> d2(static_cast<std::size_t>(p));
    for (int c = 1; c < k; ++c) {
        double total = 0.0;
        for (Eigen::Index i = 0; i < p; ++i) {
            double best = sq_dist_row(xc, i, centroids, 0);
            for (int cc = 1; cc < c; ++cc) best = std::min(best, sq_dist_row(xc, i, centroids, cc));
            d2[static_cast<std::size_t>(i)] = best;
            total += best;
        }
        Eigen::Index pick;
        if (total > 0.0) {
            const double target = rng.uniform() * total;
            double acc = 0.0;
            pick = p - 1;
            for (Eigen::Index i = 0; i < p; ++i) {
                acc += d2[static_cast<std::size_t>(i)];
                if (acc > target) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = static_cast<Eigen::Index>(rng.below(static_cast<uint64_t>(p)));
        }
        centroids.row(c) = xc.row(pick);
    }

    std::vector<int> labels(static_cast<std::size_t>(p), 0);
    for (int iter = 0; iter < max_iters; ++iter) {
        for (Eigen::Index i = 0; i < p; ++i) {
            int best = 0;
            double bd = sq_dist_row(xc, i, centroids, 0);
            for (int c = 1; c < k; ++c) {
                const double d = sq_dist_row(xc, i, centroids, c);
                if (d < bd) {
                    bd = d;
                    best = c;
                }
            }
            labels[static_cast<std::size_t>(i)] = best;
        }

        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, dim);
        std::vector<Eigen::Index> counts(static_cast<std::size_t>(k), 0);
        for (Eigen::Index i = 0; i < p; ++i) {
            sums.row(labels[static_cast<std::size_t>(i)]) += xc.row(i);
            ++counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) continue;
            Eigen::Index far = -1;
            double far_d = -1.0;
            for (Eigen::Index i = 0; i < p; ++i) {
                const int l = labels[static_cast<std::size_t>(i)];
                if (counts[static_cast<std::size_t>(l)] <= 1) continue;
                const double d = sq_dist_row(xc, i, centroids, l);
                if (d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            if (far < 0) continue;
            const int old = labels[static_cast<std::size_t>(far)];
            sums.row(old) -= xc.row(far);
            --counts[static_cast<std::size_t>(old)];
            sums.row(c) = xc.row(far);
            counts[static_cast<std::size_t>(c)] = 1;
            labels[static_cast<std::size_t>(far)] = c;
        }

        double shift = 0.0;
        for (int c = 0; c < k; ++c) {
            Eigen::RowVectorXd next = counts[static_cast<std::size_t>(c)] > 0
                                          ? (sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)])).eval()
                                          : centroids.row(c).eval();
            shift = std::max(shift, (next - centroids.row(c)).norm());
            centroids.row(c) = next;
        }
        if (shift <= tol) break;
    }

    for (Eigen::Index i = 0; i < p; ++i) {
        int best = 0;
        double bd = sq_dist_row(xc, i, centroids, 0);
        for (int c = 1; c < k; ++c) {
            const double d = sq_dist_row(xc, i, centroids, c);
            if (d < bd) {
                bd = d;
                best = c;
            }
        }
        labels[static_cast<std::size_t>(i)] = best;
    }
    double inertia = 0.0;
    for (Eigen::Index i = 0; i < p; ++i)
        inertia += sq_dist_row(xc, i, centroids, labels[static_cast<std::size_t>(i)]);

    return {std::move(labels), std::move(centroids), inertia};
}

} // namespace detail

inline KmeansResult cluster_features(const Eigen::MatrixXd& x, int k, uint64_t seed = 0,
                                     int restarts = 10, int max_iters = 300, double tol = 1e-6) {
    const Eigen::Index p = x.rows();
    if (k < 1 || k > p)
        throw ValidationError("cluster count must be in [1, rows], got " + std::to_string(k));

    // rows are sorted into a content order first so the outcome ignores input order
    std::vector<Eigen::Index> order(static_cast<std::size_t>(p));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return detail::row_less(x, a, b); });
    Eigen::MatrixXd xc(p, x.cols());
    for (Eigen::Index t = 0; t < p; ++t) xc.row(t) = x.row(order[static_cast<std::size_t>(t)]);

    detail::KmeansRun best{{}, {}, std::numeric_limits<double>::infinity()};
    for (int restart = 0; restart < restarts; ++restart) {
        Rng rng(derive_seed(seed, static_cast<uint64_t>(restart)));
        detail::KmeansRun run = detail::kmeans_once(xc, k, rng, max_iters, tol);
        if (run.inertia < best.inertia) best = std::move(run);
    }

    KmeansResult out;
    out.labels.assign(static_cast<std::size_t>(p), 0);
    for (Eigen::Index t = 0; t < p; ++t)
        out.labels[static_cast<std::size_t>(order[static_cast<std::size_t>(t)])] =
            best.labels[static_cast<std::size_t>(t)];
    out.centroids = std::move(best.centroids);
    out.inertia = best.inertia;
    return out;
}

inline Eigen::MatrixXd meta_features(const Eigen::MatrixXd& x, const Eigen::MatrixXd& v) {
    if (x.cols() != v.rows()) throw ValidationError("feature count mismatch");
    return x * v;
}

inline Eigen::MatrixXd cluster_mean_features(const Eigen::MatrixXd& x,
                                             const std::vector<int>& labels, int k) {
    if (labels.size() != static_cast<std::size_t>(x.cols()))
        throw ValidationError("label count must equal feature count");
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(x.rows(), k);
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (std::size_t j = 0; j < labels.size(); ++j) {
        const int c = labels[j];
        if (c < 0 || c >= k) throw ValidationError("label out of range: " + std::to_string(c));
        out.col(c) += x.col(static_cast<Eigen::Index>(j));
        ++counts[static_cast<std::size_t>(c)];
    }
    for (int c = 0; c < k; ++c)
        if (counts[static_cast<std::size_t>(c)] > 0) out.col(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);
    return out;
}

struct LogisticReport {
    double train_accuracy = 0.0;
    double test_accuracy = 0.0;
};

inline LogisticReport logistic_eval(const Eigen::MatrixXd& train_x, const std::vector<int>& train_y,
                                    const Eigen::MatrixXd& test_x, const std::vector<int>& test_y,
                                    double lr = 0.1, int iters = 2000, double l2 = 1e-4) {
    const Eigen::Index n = train_x.rows();
    const Eigen::Index m = train_x.cols();
    if (train_y.size() != static_cast<std::size_t>(n)) throw ValidationError("train label count mismatch");
    if (test_y.size() != static_cast<std::size_t>(test_x.rows())) throw ValidationError("test label count mismatch");
    if (test_x.cols() != m) throw ValidationError("test feature count mismatch");

    int num_classes = 0;
    for (int y : train_y) {
        if (y < 0) throw ValidationError("negative class label");
        num_classes = std::max(num_classes, y + 1);
    }
    for (int y : test_y)
        if (y < 0 || y >= num_classes) throw ValidationError("test label outside training classes");
    if (num_classes < 2) throw ValidationError("need at least 2 classes");

    Eigen::RowVectorXd mean = train_x.colwise().mean();
    Eigen::RowVectorXd sd(m);
    for (Eigen::Index j = 0; j < m; ++j) {
        const double var = (train_x.col(j).array() - mean(j)).square().sum() / static_cast<double>(n);
        sd(j) = var > 0.0 ? std::sqrt(var) : 1.0;
    }
    Eigen::MatrixXd xtr = (train_x.rowwise() - mean).array().rowwise() / sd.array();
    Eigen::MatrixXd xte = (test_x.rowwise() - mean).array().rowwise() / sd.array();

    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(m, num_classes);
    Eigen::RowVectorXd b = Eigen::RowVectorXd::Zero(num_classes);
    Eigen::MatrixXd onehot = Eigen::MatrixXd::Zero(n, num_classes);
    for (Eigen::Index i = 0; i < n; ++i) onehot(i, train_y[static_cast<std::size_t>(i)]) = 1.0;

    for (int it = 0; it < iters; ++it) {
        Eigen::MatrixXd logits = (xtr * w).rowwise() + b;
        Eigen::VectorXd rowmax = logits.rowwise().maxCoeff();
        Eigen::MatrixXd expz = (logits.colwise() - rowmax).array().exp();
        Eigen::VectorXd z = expz.rowwise().sum();
        Eigen::MatrixXd probs = expz.array().colwise() / z.array();
        Eigen::MatrixXd diff = (probs - onehot) / static_cast<double>(n);
        Eigen::MatrixXd grad_w = xtr.transpose() * diff + l2 * w;
        Eigen::RowVectorXd grad_b = diff.colwise().sum();
        w -= lr * grad_w;
        b -= lr * grad_b;
    }

    auto accuracy = [&](const Eigen::MatrixXd& xs, const std::vector<int>& ys) {
        Eigen::MatrixXd logits = (xs * w).rowwise() + b;
        Eigen::Index hits = 0;
        for (Eigen::Index i = 0; i < xs.rows(); ++i) {
            int best = 0;
            for (int c = 1; c < num_classes; ++c)
                if (logits(i, c) > logits(i, best)) best = c;
            if (best == ys[static_cast<std::size_t>(i)]) ++hits;
        }
        return static_cast<double>(hits) / static_cast<double>(xs.rows());
    };

    LogisticReport rep;
    rep.train_accuracy = accuracy(xtr, train_y);
    rep.test_accuracy = accuracy(xte, test_y);
    return rep;
}

} // namespace disc
