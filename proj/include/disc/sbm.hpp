#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "rng.hpp"

namespace disc {

struct SbmSpec {
    std::vector<int> block_sizes;
    double p_intra = 0.8;
    double q_inter = 0.2;
    uint64_t seed = 0;
};

inline void validate(const SbmSpec& spec) {
    if (spec.block_sizes.empty()) throw ValidationError("block_sizes must be non-empty");
    for (int b : spec.block_sizes)
        if (b <= 0) throw ValidationError("block sizes must be positive");
    if (!(spec.q_inter >= 0.0 && spec.q_inter < spec.p_intra && spec.p_intra <= 1.0))
        throw ValidationError("need 0 <= q < p <= 1");
}

struct SbmInstance {
    Eigen::MatrixXd adjacency;
    std::vector<int> labels;
    SbmSpec spec;
};

struct RecoveryReport {
    std::vector<int> estimated_gamma;
    int error_count = 0;
    double error_rate = 0.0;
    Eigen::VectorXd vector; // leading eigenvector of Q W_B Q
    double v_gamma_distance = 0.0;
};

inline Eigen::Index total_nodes(const SbmSpec& spec) {
    Eigen::Index n = 0;
    for (int b : spec.block_sizes) n += b;
    return n;
}

// one uniform draw per upper-triangle cell in row order, so equal seeds couple
// instances cell by cell across different block partitions
inline SbmInstance sample_sbm(const SbmSpec& spec) {
    validate(spec);
    const Eigen::Index n = total_nodes(spec);

    SbmInstance inst;
    inst.spec = spec;
    inst.labels.reserve(static_cast<std::size_t>(n));
    for (std::size_t b = 0; b < spec.block_sizes.size(); ++b)
        inst.labels.insert(inst.labels.end(), static_cast<std::size_t>(spec.block_sizes[b]),
                           static_cast<int>(b));

    Rng rng(spec.seed);
    inst.adjacency = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double prob = inst.labels[static_cast<std::size_t>(i)] ==
                                        inst.labels[static_cast<std::size_t>(j)]
                                    ? spec.p_intra
                                    : spec.q_inter;
            if (rng.uniform() < prob) {
                inst.adjacency(i, j) = 1.0;
                inst.adjacency(j, i) = 1.0;
            }
        }
    return inst;
}

struct SbmPair {
    SbmInstance a; // two communities [l, l+s]
    SbmInstance b; // three communities [l, l, s]
};

inline SbmPair sample_sbm_pair(int l, int s, double p, double q, uint64_t seed) {
    SbmPair out;
    out.a = sample_sbm({{l, l + s}, p, q, seed});
    out.b = sample_sbm({{l, l, s}, p, q, seed});
    return out;
}

inline Eigen::MatrixXd expected_matrix(const SbmSpec& spec) {
    validate(spec);
    const Eigen::Index n = total_nodes(spec);
    Eigen::MatrixXd e = Eigen::MatrixXd::Constant(n, n, spec.q_inter);
    Eigen::Index off = 0;
    for (int b : spec.block_sizes) {
        e.block(off, off, b, b).setConstant(spec.p_intra);
        off += b;
    }
    return e;
}

// Delta Theta Delta, the k x k compression of the expected matrix
inline Eigen::MatrixXd reduced_matrix(const SbmSpec& spec) {
    const int k = static_cast<int>(spec.block_sizes.size());
    Eigen::MatrixXd theta = Eigen::MatrixXd::Constant(k, k, spec.q_inter);
    theta.diagonal().setConstant(spec.p_intra);
    Eigen::VectorXd d(k);
    for (int b = 0; b < k; ++b) d(b) = std::sqrt(static_cast<double>(spec.block_sizes[b]));
    return d.asDiagonal() * theta * d.asDiagonal();
}

struct LiftedEigs {
    Eigen::MatrixXd vectors; // n x top, orthonormal
    Eigen::VectorXd values;  // descending
};

inline LiftedEigs expected_top_eigvecs(const SbmSpec& spec, int top) {
    const int k = static_cast<int>(spec.block_sizes.size());
    if (top < 1 || top > k) throw ValidationError("top must be in [1, block count]");
    Eigen::MatrixXd r = reduced_matrix(spec);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r);
    if (es.info() != Eigen::Success) throw NumericError("reduced eigensolver failed");

    const Eigen::Index n = total_nodes(spec);
    LiftedEigs out;
    out.vectors = Eigen::MatrixXd::Zero(n, top);
    out.values.resize(top);
    for (int t = 0; t < top; ++t) {
        const int src = k - 1 - t;
        out.values(t) = es.eigenvalues()(src);
        Eigen::Index off = 0;
        for (int b = 0; b < k; ++b) {
            const int m = spec.block_sizes[static_cast<std::size_t>(b)];
            out.vectors.col(t).segment(off, m).setConstant(es.eigenvectors()(b, src) /
                                                           std::sqrt(static_cast<double>(m)));
            off += m;
        }
        out.vectors.col(t) /= out.vectors.col(t).norm();
    }
    return out;
}

struct ExtremeEigs {
    Eigen::VectorXd top_values;    // descending
    Eigen::MatrixXd top_vectors;
    Eigen::VectorXd bottom_values; // ascending
    Eigen::MatrixXd bottom_vectors;
};

// Lanczos with full reorthogonalization; apply must be symmetric
template <typename Apply>
ExtremeEigs extreme_eigs(const Apply& apply, Eigen::Index n, int n_top, int n_bottom,
                         uint64_t seed, int max_iters = 400, double tol = 1e-9) {
    const int want = n_top + n_bottom;
    if (want < 1) throw ValidationError("need at least one requested eigenpair");
    max_iters = static_cast<int>(std::min<Eigen::Index>(max_iters, n));

    Rng rng(seed);
    Eigen::MatrixXd basis(n, max_iters + 1);
    {
        Eigen::VectorXd v0(n);
        for (Eigen::Index i = 0; i < n; ++i) v0(i) = rng.gaussian();
        basis.col(0) = v0 / v0.norm();
    }

    std::vector<double> alpha, beta;
    int m = 0;
    bool exhausted = false;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tsolve;

    auto tridiag = [&](int size) {
        Eigen::MatrixXd t = Eigen::MatrixXd::Zero(size, size);
        for (int i = 0; i < size; ++i) {
            t(i, i) = alpha[static_cast<std::size_t>(i)];
            if (i + 1 < size) {
                t(i, i + 1) = beta[static_cast<std::size_t>(i)];
                t(i + 1, i) = beta[static_cast<std::size_t>(i)];
            }
        }
        return t;
    };

    for (int j = 0; j < max_iters; ++j) {
        Eigen::VectorXd w = apply(Eigen::VectorXd(basis.col(j)));
        const double a = basis.col(j).dot(w);
        alpha.push_back(a);
        w -= a * basis.col(j);
        if (j > 0) w -= beta[static_cast<std::size_t>(j - 1)] * basis.col(j - 1);
        for (int pass = 0; pass < 2; ++pass)
            w -= basis.leftCols(j + 1) * (basis.leftCols(j + 1).transpose() * w);
        const double b = w.norm();
        m = j + 1;

        double scale = 0.0;
        for (double x : alpha) scale = std::max(scale, std::abs(x));
        for (double x : beta) scale = std::max(scale, std::abs(x));
        if (b <= 1e-13 * std::max(1.0, scale)) {
            exhausted = true;
            break;
        }
        beta.push_back(b);
        basis.col(j + 1) = w / b;

        if (m >= want + 2 && (m % 5 == 0 || j + 1 == max_iters)) {
            tsolve.compute(tridiag(m));
            bool done = true;
            for (int t = 0; t < n_top && done; ++t)
                done = b * std::abs(tsolve.eigenvectors()(m - 1, m - 1 - t)) <=
                       tol * std::max(1.0, std::abs(tsolve.eigenvalues()(m - 1 - t)));
            for (int t = 0; t < n_bottom && done; ++t)
                done = b * std::abs(tsolve.eigenvectors()(m - 1, t)) <=
                       tol * std::max(1.0, std::abs(tsolve.eigenvalues()(t)));
            if (done) break;
        }
    }

    if (m < want) throw NumericError("Krylov space smaller than requested eigenpair count");
    tsolve.compute(tridiag(m));

    ExtremeEigs out;
    out.top_values.resize(n_top);
    out.top_vectors.resize(n, n_top);
    for (int t = 0; t < n_top; ++t) {
        out.top_values(t) = tsolve.eigenvalues()(m - 1 - t);
        Eigen::VectorXd v = basis.leftCols(m) * tsolve.eigenvectors().col(m - 1 - t);
        out.top_vectors.col(t) = v / v.norm();
    }
    out.bottom_values.resize(n_bottom);
    out.bottom_vectors.resize(n, n_bottom);
    for (int t = 0; t < n_bottom; ++t) {
        out.bottom_values(t) = tsolve.eigenvalues()(t);
        Eigen::VectorXd v = basis.leftCols(m) * tsolve.eigenvectors().col(t);
        out.bottom_vectors.col(t) = v / v.norm();
    }
    (void)exhausted;
    return out;
}

struct Lemma1Report {
    double distance = 0.0;
    double lambda3 = 0.0;
    double bound = 0.0; // sqrt(8 s / l)
};

inline Lemma1Report lemma1_check(const SbmSpec& spec) {
    validate(spec);
    if (spec.block_sizes.size() != 3 || spec.block_sizes[0] != spec.block_sizes[1])
        throw ValidationError("expected three blocks [l, l, s]");
    const int l = spec.block_sizes[0];
    const int s = spec.block_sizes[2];
    const Eigen::Index n = total_nodes(spec);

    // the expected matrix is block-constant and positive definite on its block
    // basis, so its top three eigenpairs are exactly the lifted k x k ones
    LiftedEigs eigs = expected_top_eigvecs(spec, 3);

    Eigen::VectorXd vg = eigs.vectors.col(2);
    if (vg.tail(s).mean() < 0.0) vg = -vg;
    Eigen::VectorXd eg = Eigen::VectorXd::Zero(n);
    eg.tail(s).setConstant(1.0 / std::sqrt(static_cast<double>(s)));

    Lemma1Report rep;
    rep.lambda3 = eigs.values(2);
    rep.distance = (vg - eg).norm();
    rep.bound = std::sqrt(8.0 * static_cast<double>(s) / static_cast<double>(l));
    const double floor = (spec.p_intra - spec.q_inter) * static_cast<double>(s);
    if (rep.lambda3 < floor)
        throw NumericError("lambda3 " + std::to_string(rep.lambda3) + " below floor " +
                           std::to_string(floor));
    return rep;
}

inline RecoveryReport recover_gamma(const SbmInstance& wa, const SbmInstance& wb, int d = 2) {
    if (d != 2) throw ValidationError("recovery uses exactly 2 suppressed directions");
    if (wa.spec.block_sizes.size() != 2 || wb.spec.block_sizes.size() != 3)
        throw ValidationError("block-structure mismatch: need [l, l+s] vs [l, l, s]");
    const int l = wb.spec.block_sizes[0];
    const int s = wb.spec.block_sizes[2];
    if (wb.spec.block_sizes[1] != l || wa.spec.block_sizes[0] != l ||
        wa.spec.block_sizes[1] != l + s)
        throw ValidationError("block-structure mismatch: need [l, l+s] vs [l, l, s]");
    const Eigen::Index n = wa.adjacency.rows();
    if (wb.adjacency.rows() != n) throw ValidationError("node sets differ");

    const auto& a = wa.adjacency;
    const auto& b = wb.adjacency;
    ExtremeEigs top_a = extreme_eigs([&](const Eigen::VectorXd& x) { return (a * x).eval(); }, n,
                                     2, 0, derive_seed(wa.spec.seed, 777));
    const Eigen::MatrixXd& u = top_a.top_vectors;

    auto project = [&](Eigen::VectorXd x) {
        x -= u * (u.transpose() * x).eval();
        return x;
    };
    auto qwq = [&](const Eigen::VectorXd& x) { return project((b * project(x)).eval()); };
    ExtremeEigs lead = extreme_eigs(qwq, n, 1, 0, derive_seed(wb.spec.seed, 778));

    Eigen::VectorXd v = lead.top_vectors.col(0);
    const double gamma_mean = v.tail(s).mean();
    if (gamma_mean < 0.0) {
        v = -v;
    } else if (gamma_mean == 0.0) {
        Eigen::Index best = 0;
        for (Eigen::Index i = 1; i < n; ++i)
            if (std::abs(v(i)) > std::abs(v(best))) best = i;
        if (v(best) < 0.0) v = -v;
    }

    const double threshold = 1.0 / (2.0 * std::sqrt(static_cast<double>(s)));
    RecoveryReport rep;
    rep.vector = v;
    int sym_diff = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const bool in_est = v(i) > threshold;
        const bool in_true = i >= 2 * l;
        if (in_est) rep.estimated_gamma.push_back(static_cast<int>(i));
        if (in_est != in_true) ++sym_diff;
    }
    rep.error_count = sym_diff;
    rep.error_rate = static_cast<double>(sym_diff) / static_cast<double>(s);
    Eigen::VectorXd eg = Eigen::VectorXd::Zero(n);
    eg.tail(s).setConstant(1.0 / std::sqrt(static_cast<double>(s)));
    rep.v_gamma_distance = (v - eg).norm();
    return rep;
}

struct ExperimentCell {
    double alpha = 0.0;
    int l = 0;
    int trial = 0;
    std::string quantity;
    double value = 0.0;
};

struct SlopeFit {
    double alpha = 0.0;
    std::string quantity;
    double fitted = 0.0;
    double theoretical = 0.0;
};

struct SlopeExperiment {
    std::vector<ExperimentCell> cells;
    std::vector<SlopeFit> fits;
};

namespace sbm_detail {

inline double loglog_slope(const std::vector<double>& ls, const std::vector<double>& ys) {
    const std::size_t n = ls.size();
    double sx = 0.0, sy = 0.0;
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = std::log(ls[i]);
        y[i] = std::log(ys[i]);
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / static_cast<double>(n);
    const double my = sy / static_cast<double>(n);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += (x[i] - mx) * (y[i] - my);
        den += (x[i] - mx) * (x[i] - mx);
    }
    return num / den;
}

} // namespace sbm_detail

// per trial: lambda3 of a sampled three-block matrix, and the spectral norm of
// Q_EB E_B Q_EB - Q_EA W_B Q_EA with projectors from the expected matrices
inline SlopeExperiment slope_experiment(const std::vector<int>& l_grid,
                                        const std::vector<double>& alpha_grid, double p, double q,
                                        int trials, uint64_t seed) {
    if (l_grid.size() < 3) throw ValidationError("need at least 3 block-size grid points");
    if (trials < 1) throw ValidationError("trials must be positive");
    for (double a : alpha_grid)
        if (!(a > 0.5 && a < 1.0)) throw ValidationError("alpha must lie in (0.5, 1)");

    const uint64_t stream = derive_seed(seed, 1);
    SlopeExperiment out;
    for (std::size_t ai = 0; ai < alpha_grid.size(); ++ai) {
        const double alpha = alpha_grid[ai];
        std::vector<double> lam_means, num_means, lvals;
        for (std::size_t li = 0; li < l_grid.size(); ++li) {
            const int l = l_grid[li];
            const int s = static_cast<int>(std::lround(std::pow(static_cast<double>(l), alpha)));
            const Eigen::Index n = 2 * static_cast<Eigen::Index>(l) + s;
            SbmSpec spec_b{{l, l, s}, p, q, 0};
            SbmSpec spec_a{{l, l + s}, p, q, 0};
            Eigen::MatrixXd ub = expected_top_eigvecs(spec_b, 2).vectors;
            Eigen::MatrixXd ua = expected_top_eigvecs(spec_a, 2).vectors;

            auto eb_apply = [&](const Eigen::VectorXd& x) {
                Eigen::VectorXd y = Eigen::VectorXd::Constant(n, q * x.sum());
                Eigen::Index off = 0;
                for (int b : spec_b.block_sizes) {
                    y.segment(off, b).array() += (p - q) * x.segment(off, b).sum();
                    off += b;
                }
                return y;
            };

            double lam_sum = 0.0, num_sum = 0.0;
            for (int t = 0; t < trials; ++t) {
                const uint64_t idx =
                    (static_cast<uint64_t>(ai) * l_grid.size() + li) * static_cast<uint64_t>(trials) +
                    static_cast<uint64_t>(t);
                spec_b.seed = derive_seed(stream, idx);
                SbmInstance inst = sample_sbm(spec_b);
                const auto& w = inst.adjacency;

                ExtremeEigs top =
                    extreme_eigs([&](const Eigen::VectorXd& x) { return (w * x).eval(); }, n, 3, 0,
                                 derive_seed(spec_b.seed, 11), 400, 1e-7);
                const double lam3 = top.top_values(2);

                auto qb = [&](Eigen::VectorXd x) {
                    x -= ub * (ub.transpose() * x).eval();
                    return x;
                };
                auto qa = [&](Eigen::VectorXd x) {
                    x -= ua * (ua.transpose() * x).eval();
                    return x;
                };
                auto m_apply = [&](const Eigen::VectorXd& x) {
                    Eigen::VectorXd t1 = qb(eb_apply(qb(x)));
                    Eigen::VectorXd t2 = qa((w * qa(x)).eval());
                    return (t1 - t2).eval();
                };
                ExtremeEigs ext = extreme_eigs(m_apply, n, 1, 1, derive_seed(spec_b.seed, 12), 400, 1e-7);
                const double nrm = std::max(std::abs(ext.top_values(0)), std::abs(ext.bottom_values(0)));

                lam_sum += lam3;
                num_sum += nrm;
                out.cells.push_back({alpha, l, t, "lambda3", lam3});
                out.cells.push_back({alpha, l, t, "numerator", nrm});
            }
            lam_means.push_back(lam_sum / trials);
            num_means.push_back(num_sum / trials);
            lvals.push_back(static_cast<double>(l));
        }
        out.fits.push_back({alpha, "lambda3", sbm_detail::loglog_slope(lvals, lam_means), alpha});
        out.fits.push_back({alpha, "numerator", sbm_detail::loglog_slope(lvals, num_means),
                            std::max(0.5, 1.5 * alpha - 0.5)});
    }
    return out;
}

struct RecoveryExperiment {
    std::vector<ExperimentCell> cells; // quantity "error_rate"
    std::vector<double> mean_error_rates; // one per l
};

inline RecoveryExperiment recovery_experiment(const std::vector<int>& l_grid, double alpha,
                                              double p, double q, int trials, uint64_t seed) {
    if (!(alpha > 0.5 && alpha < 1.0)) throw ValidationError("alpha must lie in (0.5, 1)");
    if (trials < 1) throw ValidationError("trials must be positive");
    const uint64_t stream = derive_seed(seed, 2);
    RecoveryExperiment out;
    for (std::size_t li = 0; li < l_grid.size(); ++li) {
        const int l = l_grid[li];
        const int s = static_cast<int>(std::lround(std::pow(static_cast<double>(l), alpha)));
        double sum = 0.0;
        for (int t = 0; t < trials; ++t) {
            const uint64_t idx = static_cast<uint64_t>(li) * static_cast<uint64_t>(trials) +
                                 static_cast<uint64_t>(t);
            SbmPair pair = sample_sbm_pair(l, s, p, q, derive_seed(stream, idx));
            RecoveryReport rep = recover_gamma(pair.a, pair.b);
            sum += rep.error_rate;
            out.cells.push_back({alpha, l, t, "error_rate", rep.error_rate});
        }
        out.mean_error_rates.push_back(sum / trials);
    }
    return out;
}

// spectral norm of W - E[W] over sqrt(node count), diagonal excluded on both sides
inline double concentration_ratio(const SbmSpec& spec) {
    SbmInstance inst = sample_sbm(spec);
    Eigen::MatrixXd e = expected_matrix(spec);
    e.diagonal().setZero();
    const Eigen::Index n = inst.adjacency.rows();
    Eigen::MatrixXd diff = inst.adjacency - e;
    ExtremeEigs ext = extreme_eigs([&](const Eigen::VectorXd& x) { return (diff * x).eval(); }, n,
                                   1, 1, derive_seed(spec.seed, 13), 400, 1e-7);
    const double nrm = std::max(std::abs(ext.top_values(0)), std::abs(ext.bottom_values(0)));
    return nrm / std::sqrt(static_cast<double>(n));
}

} // namespace disc
