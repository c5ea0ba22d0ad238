#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <vector>

#include "errors.hpp"
#include "feature_graph.hpp"

namespace disc {

struct SpectralBasis {
    Eigen::MatrixXd vectors;     // p x d, unit-norm columns
    Eigen::VectorXd eigenvalues; // descending, eigenvalues of the random walk matrix
};

struct DifferentialResult {
    Eigen::MatrixXd v;     // p x r right singular vectors
    Eigen::VectorXd sigma; // non-increasing
};

struct MultiResult {
    std::vector<DifferentialResult> results;
    std::vector<int> dropped; // basis columns removed per dataset when pooling the others
};

struct CutResult {
    Eigen::MatrixXd vectors; // p x r, unit-norm columns
    Eigen::VectorXd mu;      // ascending generalized eigenvalues, zero mode excluded
};

inline void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
    Eigen::Index best = 0;
    double mag = -1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double a = std::abs(v(i));
        if (a > mag) {
            mag = a;
            best = i;
        }
    }
    if (v(best) < 0.0) v = -v;
}

inline SpectralBasis leading_eigenvectors(const FeatureGraph& g, int d) {
    const Eigen::Index p = g.weights.rows();
    if (d < 1 || d > p)
        throw ValidationError("basis size must be in [1, p], got " + std::to_string(d) +
                              " for p=" + std::to_string(p));

    Eigen::VectorXd dinv_sqrt = g.degrees.cwiseSqrt().cwiseInverse();
    Eigen::MatrixXd s = dinv_sqrt.asDiagonal() * g.weights * dinv_sqrt.asDiagonal();
    s = 0.5 * (s + s.transpose().eval());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
    if (es.info() != Eigen::Success) throw NumericError("symmetric eigensolver failed to converge");

    SpectralBasis basis;
    basis.vectors.resize(p, d);
    basis.eigenvalues.resize(d);
    for (int i = 0; i < d; ++i) {
        const Eigen::Index src = p - 1 - i;
        basis.eigenvalues(i) = es.eigenvalues()(src);
        Eigen::VectorXd u = dinv_sqrt.asDiagonal() * es.eigenvectors().col(src);
        u /= u.norm();
        fix_sign(u);
        basis.vectors.col(i) = u;
    }
    return basis;
}

namespace detail {

inline Eigen::MatrixXd orthonormal_span(const Eigen::MatrixXd& u, double drop_tol, int* dropped) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(u);
    const Eigen::VectorXd rdiag = qr.matrixQR().diagonal().cwiseAbs();
    const double top = rdiag.size() ? rdiag(0) : 0.0;
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < rdiag.size(); ++i)
        if (rdiag(i) > drop_tol * top) ++rank;
    if (dropped) *dropped = static_cast<int>(u.cols() - rank);
    Eigen::MatrixXd q1 = qr.householderQ() * Eigen::MatrixXd::Identity(u.rows(), rank);
    return q1;
}

} // namespace detail

// I - U (U^T U)^-1 U^T, the oblique-safe projector onto span(U)'s complement
inline Eigen::MatrixXd complement_projector(const Eigen::MatrixXd& u) {
    const Eigen::Index p = u.rows();
    if (u.cols() == 0) return Eigen::MatrixXd::Identity(p, p);

    Eigen::MatrixXd gram = u.transpose() * u;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    if (es.info() != Eigen::Success) throw NumericError("projector Gram eigensolver failed");
    const double lo = es.eigenvalues()(0);
    const double hi = es.eigenvalues()(gram.rows() - 1);
    if (!(lo > 0.0) || hi / lo > 1e8)
        throw NumericError("basis is numerically rank-deficient (condition " +
                           std::to_string(lo > 0.0 ? hi / lo : std::nan("")) +
                           "); reduce the basis size");

    Eigen::MatrixXd q1 = detail::orthonormal_span(u, 0.0, nullptr);
    Eigen::MatrixXd q = Eigen::MatrixXd::Identity(p, p);
    q.selfadjointView<Eigen::Lower>().rankUpdate(q1, -1.0);
    q.triangularView<Eigen::StrictlyUpper>() = q.transpose();
    return q;
}

inline Eigen::MatrixXd complement_projector_pooled(const Eigen::MatrixXd& u, int* dropped,
                                                   double drop_tol = 1e-10) {
    const Eigen::Index p = u.rows();
    if (u.cols() == 0) {
        if (dropped) *dropped = 0;
        return Eigen::MatrixXd::Identity(p, p);
    }
    Eigen::MatrixXd q1 = detail::orthonormal_span(u, drop_tol, dropped);
    Eigen::MatrixXd q = Eigen::MatrixXd::Identity(p, p);
    q.selfadjointView<Eigen::Lower>().rankUpdate(q1, -1.0);
    q.triangularView<Eigen::StrictlyUpper>() = q.transpose();
    return q;
}

inline DifferentialResult differential_vectors(const Eigen::MatrixXd& rw, const Eigen::MatrixXd& q,
                                               int r) {
    const Eigen::Index p = rw.rows();
    if (r < 1 || r > p)
        throw ValidationError("rank must be in [1, p], got " + std::to_string(r) +
                              " for p=" + std::to_string(p));

    Eigen::MatrixXd m = rw * q;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);

    DifferentialResult out;
    out.v.resize(p, r);
    out.sigma.resize(r);
    for (int i = 0; i < r; ++i) {
        out.sigma(i) = svd.singularValues()(i);
        Eigen::VectorXd col = svd.matrixV().col(i);
        fix_sign(col);
        out.v.col(i) = col;
    }
    return out;
}

struct PairResult {
    DifferentialResult a; // directions active in A, suppressed in B
    DifferentialResult b;
};

inline PairResult disc_pair(const FeatureGraph& ga, const FeatureGraph& gb, int d_a = 20,
                            int d_b = 20, int r = 0) {
    const Eigen::Index p = ga.weights.rows();
    if (gb.weights.rows() != p) throw ValidationError("graphs must share the node set");
    if (r == 0) r = static_cast<int>(std::min<Eigen::Index>(10, p));

    SpectralBasis ua = leading_eigenvectors(ga, d_a);
    SpectralBasis ub = leading_eigenvectors(gb, d_b);
    Eigen::MatrixXd qa = complement_projector(ua.vectors);
    Eigen::MatrixXd qb = complement_projector(ub.vectors);

    PairResult out;
    out.a = differential_vectors(ga.rw, qb, r);
    out.b = differential_vectors(gb.rw, qa, r);
    return out;
}

inline PairResult disc_pair(const Eigen::MatrixXd& xa, const Eigen::MatrixXd& xb,
                            const KernelSpec& spec, int d_a = 20, int d_b = 20, int r = 0) {
    return disc_pair(build_graph(xa, spec), build_graph(xb, spec), d_a, d_b, r);
}

inline MultiResult disc_multi(const std::vector<FeatureGraph>& graphs, int d = 20, int r = 0) {
    if (graphs.size() < 2) throw ValidationError("need at least 2 datasets");
    const Eigen::Index p = graphs[0].weights.rows();
    for (const auto& g : graphs)
        if (g.weights.rows() != p) throw ValidationError("graphs must share the node set");
    if (r == 0) r = static_cast<int>(std::min<Eigen::Index>(10, p));

    std::vector<SpectralBasis> bases;
    bases.reserve(graphs.size());
    for (const auto& g : graphs) bases.push_back(leading_eigenvectors(g, d));

    MultiResult out;
    out.results.reserve(graphs.size());
    out.dropped.reserve(graphs.size());
    for (std::size_t m = 0; m < graphs.size(); ++m) {
        Eigen::Index cols = 0;
        for (std::size_t j = 0; j < graphs.size(); ++j)
            if (j != m) cols += bases[j].vectors.cols();
        Eigen::MatrixXd pooled(p, cols);
        Eigen::Index at = 0;
        for (std::size_t j = 0; j < graphs.size(); ++j) {
            if (j == m) continue;
            pooled.middleCols(at, bases[j].vectors.cols()) = bases[j].vectors;
            at += bases[j].vectors.cols();
        }
        int dropped = 0;
        Eigen::MatrixXd q = complement_projector_pooled(pooled, &dropped);
        out.dropped.push_back(dropped);
        out.results.push_back(differential_vectors(graphs[m].rw, q, r));
    }
    return out;
}

// directions with small cut cost in B among those well separated in A:
// smallest generalized eigenvalues of L_B f = mu (L_A + eps I) f, zero mode excluded
inline CutResult generalized_cut_vectors(const FeatureGraph& ga, const FeatureGraph& gb, int r,
                                         double eps = 1e-3) {
    const Eigen::Index p = ga.weights.rows();
    if (gb.weights.rows() != p) throw ValidationError("graphs must share the node set");
    if (r < 1 || r > p - 1)
        throw ValidationError("rank must be in [1, p-1], got " + std::to_string(r));
    if (!(eps > 0.0)) throw ValidationError("eps must be positive");

    Eigen::MatrixXd la = Eigen::MatrixXd(ga.degrees.asDiagonal()) - ga.weights;
    Eigen::MatrixXd lb = Eigen::MatrixXd(gb.degrees.asDiagonal()) - gb.weights;
    la.diagonal().array() += eps;

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(lb, la);
    if (es.info() != Eigen::Success) throw NumericError("generalized eigensolver failed");

    CutResult out;
    out.vectors.resize(p, r);
    out.mu.resize(r);
    for (int i = 0; i < r; ++i) {
        out.mu(i) = es.eigenvalues()(i + 1);
        Eigen::VectorXd v = es.eigenvectors().col(i + 1);
        v /= v.norm();
        fix_sign(v);
        out.vectors.col(i) = v;
    }
    return out;
}

} // namespace disc
