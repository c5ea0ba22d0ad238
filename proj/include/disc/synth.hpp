#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <vector>

#include "errors.hpp"
#include "matrix_io.hpp"
#include "rng.hpp"

namespace disc {

enum class ToyProblem { newly_connected, split_groups, split_both, multi3, partial_corr };

inline ToyProblem parse_problem(const std::string& tag) {
    if (tag == "newly_connected") return ToyProblem::newly_connected;
    if (tag == "split_groups") return ToyProblem::split_groups;
    if (tag == "split_both") return ToyProblem::split_both;
    if (tag == "multi3") return ToyProblem::multi3;
    if (tag == "partial_corr") return ToyProblem::partial_corr;
    throw ValidationError("unknown problem tag: " + tag);
}

struct ToySpec {
    ToyProblem problem = ToyProblem::newly_connected;
    Eigen::Index n = 10000;
    uint64_t seed = 0;
    double rho = 1.0; // partial_corr only
};

struct CovBlock {
    int start = 0;            // first column of the block
    int rank = 0;             // structural factor count, for convergence bounds
    Eigen::MatrixXd cov;      // population covariance of the block
};

struct ToyOutput {
    std::vector<std::string> names;
    std::vector<DataMatrix> datasets;
    std::vector<std::vector<int>> ground_truth;      // per dataset, 0-based differential columns
    std::vector<std::vector<CovBlock>> cov_targets;  // correlated blocks only
};

namespace synth_detail {

inline Eigen::MatrixXd gaussian_matrix(Rng& rng, Eigen::Index n, Eigen::Index m) {
    Eigen::MatrixXd x(n, m);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < m; ++j) x(i, j) = rng.gaussian();
    return x;
}

inline Eigen::VectorXd mixture_shifts(Rng& rng, Eigen::Index n, double amp) {
    Eigen::VectorXd s(n);
    for (Eigen::Index i = 0; i < n; ++i) s(i) = rng.uniform() < 0.5 ? amp : -amp;
    return s;
}

struct Factor {
    Eigen::MatrixXd f;  // m x rank, columns scaled by sqrt(eigenvalue)
    Eigen::VectorXd g1; // top orthonormal direction
};

// Sigma = G diag(lambda) G^T, lambda_i ~ exp(-i*rho), trace m
inline Factor cov_factor(Eigen::Index m, int rank, double rho, Rng& rng) {
    Eigen::MatrixXd a = gaussian_matrix(rng, m, rank);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    Eigen::MatrixXd g = qr.householderQ() * Eigen::MatrixXd::Identity(m, rank);
    Eigen::VectorXd lam(rank);
    for (int i = 0; i < rank; ++i) lam(i) = std::exp(-static_cast<double>(i + 1) * rho);
    lam *= static_cast<double>(m) / lam.sum();
    Factor out;
    out.f = g * lam.cwiseSqrt().asDiagonal();
    out.g1 = g.col(0);
    return out;
}

inline Eigen::MatrixXd factor_block(Rng& rng, Eigen::Index n, const Factor& fac, bool mix = true) {
    Eigen::MatrixXd z = gaussian_matrix(rng, n, fac.f.cols());
    Eigen::MatrixXd x = z * fac.f.transpose();
    if (mix) {
        Eigen::VectorXd s = mixture_shifts(rng, n, 1.5);
        x += s * fac.g1.transpose();
    }
    return x;
}

inline Eigen::MatrixXd factor_cov(const Factor& fac, bool mix = true) {
    Eigen::MatrixXd cov = fac.f * fac.f.transpose();
    if (mix) cov += 2.25 * fac.g1 * fac.g1.transpose();
    return cov;
}

// Sigma = (1-c) I + c 11^T
inline Eigen::MatrixXd equi_block(Rng& rng, Eigen::Index n, Eigen::Index m, double c) {
    Eigen::VectorXd f(n);
    for (Eigen::Index i = 0; i < n; ++i) f(i) = rng.gaussian();
    Eigen::MatrixXd x = gaussian_matrix(rng, n, m) * std::sqrt(1.0 - c);
    x.colwise() += std::sqrt(c) * f;
    Eigen::VectorXd s = mixture_shifts(rng, n, 1.5 / std::sqrt(static_cast<double>(m)));
    x.colwise() += s;
    return x;
}

inline Eigen::MatrixXd equi_cov(Eigen::Index m, double c) {
    const double off = c + 2.25 / static_cast<double>(m);
    Eigen::MatrixXd cov = Eigen::MatrixXd::Constant(m, m, off);
    cov.diagonal().setConstant(1.0 + 2.25 / static_cast<double>(m));
    return cov;
}

constexpr double kHierHi = 0.7;
constexpr double kHierLo = 0.3;
constexpr double kEquiC = 0.6;

// one factor across the block, one per half, stronger within halves
inline Eigen::MatrixXd hier_block(Rng& rng, Eigen::Index n, Eigen::Index m) {
    const Eigen::Index h = m / 2;
    Eigen::VectorXd f0(n), f1(n), f2(n);
    for (Eigen::Index i = 0; i < n; ++i) f0(i) = rng.gaussian();
    for (Eigen::Index i = 0; i < n; ++i) f1(i) = rng.gaussian();
    for (Eigen::Index i = 0; i < n; ++i) f2(i) = rng.gaussian();
    const double a0 = std::sqrt(kHierLo);
    const double a1 = std::sqrt(kHierHi - kHierLo);
    const double an = std::sqrt(1.0 - kHierHi);

    Eigen::MatrixXd x(n, m);
    x.leftCols(h) = an * gaussian_matrix(rng, n, h);
    x.leftCols(h).colwise() += a0 * f0 + a1 * f1;
    x.rightCols(m - h) = an * gaussian_matrix(rng, n, m - h);
    x.rightCols(m - h).colwise() += a0 * f0 + a1 * f2;

    Eigen::VectorXd s = mixture_shifts(rng, n, 1.5 / std::sqrt(static_cast<double>(m)));
    x.colwise() += s;
    return x;
}

inline Eigen::MatrixXd hier_cov(Eigen::Index m) {
    const Eigen::Index h = m / 2;
    Eigen::MatrixXd cov = Eigen::MatrixXd::Constant(m, m, kHierLo);
    cov.topLeftCorner(h, h).setConstant(kHierHi);
    cov.bottomRightCorner(m - h, m - h).setConstant(kHierHi);
    cov.diagonal().setConstant(1.0);
    cov.array() += 2.25 / static_cast<double>(m);
    return cov;
}

// full-rank spectrum with decay rho; rho=0 gives the identity
inline Eigen::MatrixXd decay_factor(const Eigen::MatrixXd& g, double rho) {
    const Eigen::Index m = g.rows();
    Eigen::VectorXd lam(m);
    for (Eigen::Index i = 0; i < m; ++i) lam(i) = std::exp(-static_cast<double>(i + 1) * rho);
    lam *= static_cast<double>(m) / lam.sum();
    return g * lam.cwiseSqrt().asDiagonal();
}

inline std::vector<std::string> default_ids(Eigen::Index p) {
    std::vector<std::string> ids(static_cast<std::size_t>(p));
    for (Eigen::Index j = 0; j < p; ++j)
        ids[static_cast<std::size_t>(j)] = detail::default_feature_id(static_cast<std::size_t>(j),
                                                                      static_cast<std::size_t>(p));
    return ids;
}

inline std::vector<int> index_range(int lo, int hi) {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(hi - lo));
    for (int i = lo; i < hi; ++i) out.push_back(i);
    return out;
}

} // namespace synth_detail

inline ToyOutput generate(const ToySpec& spec) {
    namespace sd = synth_detail;
    if (spec.n < 100) throw ValidationError("n must be at least 100");
    if (spec.rho < 0.0 || spec.rho > 1.0) throw ValidationError("rho must be in [0,1]");
    const Eigen::Index n = spec.n;

    Rng cons(derive_seed(spec.seed, 1));
    ToyOutput out;

    auto dataset_rng = [&](int di) { return Rng(derive_seed(spec.seed, 1001 + static_cast<uint64_t>(di))); };

    switch (spec.problem) {
    case ToyProblem::newly_connected: {
        const Eigen::Index p = 250;
        sd::Factor fs = sd::cov_factor(50, 5, 1.0, cons);
        sd::Factor fa = sd::cov_factor(50, 5, 1.0, cons);
        sd::Factor fb = sd::cov_factor(50, 5, 1.0, cons);

        auto build = [&](Rng rng, const sd::Factor& spec_fac, bool spec_in_third) {
            Eigen::MatrixXd x(n, p);
            x.leftCols(100) = sd::gaussian_matrix(rng, n, 100);
            x.middleCols(100, 50) = sd::factor_block(rng, n, fs);
            if (spec_in_third) {
                x.middleCols(150, 50) = sd::factor_block(rng, n, spec_fac);
                x.rightCols(50) = sd::gaussian_matrix(rng, n, 50);
            } else {
                x.middleCols(150, 50) = sd::gaussian_matrix(rng, n, 50);
                x.rightCols(50) = sd::factor_block(rng, n, spec_fac);
            }
            return x;
        };
        out.names = {"a", "b"};
        out.datasets.resize(2);
        out.datasets[0].values = build(dataset_rng(0), fa, true);
        out.datasets[1].values = build(dataset_rng(1), fb, false);
        out.ground_truth = {sd::index_range(150, 200), sd::index_range(200, 250)};
        out.cov_targets = {
            {{100, 6, sd::factor_cov(fs)}, {150, 6, sd::factor_cov(fa)}},
            {{100, 6, sd::factor_cov(fs)}, {200, 6, sd::factor_cov(fb)}},
        };
        break;
    }
    case ToyProblem::split_groups: {
        auto ra = dataset_rng(0);
        auto rb = dataset_rng(1);
        Eigen::MatrixXd xa(n, 200), xb(n, 200);
        xa.leftCols(100) = sd::equi_block(ra, n, 100, sd::kEquiC);
        xa.rightCols(100) = sd::equi_block(ra, n, 100, sd::kEquiC);
        xb.leftCols(100) = sd::equi_block(rb, n, 100, sd::kEquiC);
        xb.middleCols(100, 25) = sd::equi_block(rb, n, 25, sd::kEquiC);
        xb.rightCols(75) = sd::equi_block(rb, n, 75, sd::kEquiC);
        out.names = {"a", "b"};
        out.datasets.resize(2);
        out.datasets[0].values = std::move(xa);
        out.datasets[1].values = std::move(xb);
        out.ground_truth = {{}, sd::index_range(100, 200)};
        out.cov_targets = {
            {{0, 2, sd::equi_cov(100, sd::kEquiC)}, {100, 2, sd::equi_cov(100, sd::kEquiC)}},
            {{0, 2, sd::equi_cov(100, sd::kEquiC)},
             {100, 2, sd::equi_cov(25, sd::kEquiC)},
             {125, 2, sd::equi_cov(75, sd::kEquiC)}},
        };
        break;
    }
    case ToyProblem::split_both: {
        auto ra = dataset_rng(0);
        auto rb = dataset_rng(1);
        Eigen::MatrixXd xa(n, 200), xb(n, 200);
        xa.leftCols(75) = sd::equi_block(ra, n, 75, sd::kEquiC);
        xa.middleCols(75, 25) = sd::equi_block(ra, n, 25, sd::kEquiC);
        xa.rightCols(100) = sd::equi_block(ra, n, 100, sd::kEquiC);
        xb.leftCols(100) = sd::equi_block(rb, n, 100, sd::kEquiC);
        xb.middleCols(100, 25) = sd::equi_block(rb, n, 25, sd::kEquiC);
        xb.rightCols(75) = sd::equi_block(rb, n, 75, sd::kEquiC);
        out.names = {"a", "b"};
        out.datasets.resize(2);
        out.datasets[0].values = std::move(xa);
        out.datasets[1].values = std::move(xb);
        out.ground_truth = {sd::index_range(0, 100), sd::index_range(100, 200)};
        out.cov_targets = {
            {{0, 2, sd::equi_cov(75, sd::kEquiC)},
             {75, 2, sd::equi_cov(25, sd::kEquiC)},
             {100, 2, sd::equi_cov(100, sd::kEquiC)}},
            {{0, 2, sd::equi_cov(100, sd::kEquiC)},
             {100, 2, sd::equi_cov(25, sd::kEquiC)},
             {125, 2, sd::equi_cov(75, sd::kEquiC)}},
        };
        break;
    }
    case ToyProblem::multi3: {
        // block owners, 8 blocks of 50: shared, shared, a, b, b, c, a, c
        const char* owners = "ssabbcac";
        out.names = {"a", "b", "c"};
        out.datasets.resize(3);
        out.ground_truth.resize(3);
        out.cov_targets.resize(3);
        for (int di = 0; di < 3; ++di) {
            const char me = static_cast<char>('a' + di);
            Rng rd = dataset_rng(di);
            Eigen::MatrixXd x(n, 400);
            for (int b = 0; b < 8; ++b) {
                if (owners[b] == 's') {
                    x.middleCols(50 * b, 50) = sd::equi_block(rd, n, 50, sd::kEquiC);
                    out.cov_targets[static_cast<std::size_t>(di)].push_back(
                        {50 * b, 2, sd::equi_cov(50, sd::kEquiC)});
                } else if (owners[b] == me) {
                    x.middleCols(50 * b, 50) = sd::hier_block(rd, n, 50);
                    out.cov_targets[static_cast<std::size_t>(di)].push_back({50 * b, 4, sd::hier_cov(50)});
                    auto idx = sd::index_range(50 * b, 50 * (b + 1));
                    auto& gt = out.ground_truth[static_cast<std::size_t>(di)];
                    gt.insert(gt.end(), idx.begin(), idx.end());
                } else {
                    x.middleCols(50 * b, 50) = sd::gaussian_matrix(rd, n, 50);
                }
            }
            out.datasets[static_cast<std::size_t>(di)].values = std::move(x);
        }
        break;
    }
    case ToyProblem::partial_corr: {
        const Eigen::Index p = 250;
        sd::Factor fsh = sd::cov_factor(50, 5, 1.0, cons);
        Eigen::MatrixXd gfull_raw = sd::gaussian_matrix(cons, 50, 50);
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(gfull_raw);
        Eigen::MatrixXd gfull = qr.householderQ() * Eigen::MatrixXd::Identity(50, 50);

        auto build = [&](Rng rng, double rho) {
            Eigen::MatrixXd f = sd::decay_factor(gfull, rho);
            Eigen::MatrixXd x(n, p);
            x.leftCols(100) = sd::gaussian_matrix(rng, n, 100);
            x.middleCols(100, 50) = sd::factor_block(rng, n, fsh);
            x.middleCols(150, 50) = sd::gaussian_matrix(rng, n, 50) * f.transpose();
            x.rightCols(50) = sd::gaussian_matrix(rng, n, 50);
            return x;
        };
        out.names = {"a", "b"};
        out.datasets.resize(2);
        out.datasets[0].values = build(dataset_rng(0), 1.0);
        out.datasets[1].values = build(dataset_rng(1), spec.rho);
        out.ground_truth = {sd::index_range(150, 200), {}};
        Eigen::MatrixXd fa = sd::decay_factor(gfull, 1.0);
        Eigen::MatrixXd fb = sd::decay_factor(gfull, spec.rho);
        out.cov_targets = {
            {{100, 6, sd::factor_cov(fsh)}, {150, 50, fa * fa.transpose()}},
            {{100, 6, sd::factor_cov(fsh)}, {150, 50, fb * fb.transpose()}},
        };
        break;
    }
    }

    const Eigen::Index p = out.datasets[0].values.cols();
    auto ids = sd::default_ids(p);
    for (auto& d : out.datasets) d.feature_ids = ids;
    return out;
}

struct CorrelationResult {
    Eigen::MatrixXd corr;
    bool degenerate = false;             // any zero-variance column
    std::vector<int> zero_variance_cols;
};

inline CorrelationResult correlation_matrix(const DataMatrix& data) {
    const Eigen::Index n = data.n();
    const Eigen::Index p = data.p();
    if (n < 2) throw ValidationError("need at least 2 samples");

    Eigen::MatrixXd centered = data.values.rowwise() - data.values.colwise().mean();
    Eigen::VectorXd sd = (centered.colwise().squaredNorm() / static_cast<double>(n)).cwiseSqrt();

    CorrelationResult out;
    out.corr = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index j = 0; j < p; ++j)
        if (sd(j) == 0.0) {
            out.degenerate = true;
            out.zero_variance_cols.push_back(static_cast<int>(j));
        }

    Eigen::MatrixXd scaled = centered;
    for (Eigen::Index j = 0; j < p; ++j)
        if (sd(j) > 0.0) scaled.col(j) /= sd(j) * std::sqrt(static_cast<double>(n));
    out.corr = scaled.transpose() * scaled;
    for (Eigen::Index j = 0; j < p; ++j) {
        if (sd(j) == 0.0) {
            out.corr.row(j).setZero();
            out.corr.col(j).setZero();
        } else {
            out.corr(j, j) = 1.0;
        }
    }
    return out;
}

} // namespace disc
