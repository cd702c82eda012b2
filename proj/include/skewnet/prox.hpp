#pragma once

#include <Eigen/Dense>

#include <complex>

#include "skewnet/errors.hpp"
#include "skewnet/skew.hpp"

namespace skewnet {

/// Proximal map of lambda * ||.||_1: elementwise sign(m) * max(|m| - lambda, 0).
/// Odd in its argument, so skew input gives skew output.
template <typename Derived>
DenseMatrix<typename Derived::Scalar> soft_threshold(const Eigen::MatrixBase<Derived> &m,
                                                     typename Derived::Scalar lambda) {
    using Scalar = typename Derived::Scalar;
    if (!(lambda >= 0))
        throw ParameterError("soft_threshold: lambda must be nonnegative");
    return m.unaryExpr([lambda](Scalar x) {
        const Scalar a = std::abs(x) - lambda;
        return a > 0 ? (x > 0 ? a : -a) : Scalar(0);
    });
}

template <typename Scalar>
SkewMatrix<Scalar> soft_threshold(const SkewMatrix<Scalar> &m, Scalar lambda) {
    return SkewMatrix<Scalar>::project(soft_threshold(m.matrix(), lambda));
}

/// Singular value thresholding, the proximal map of lambda * ||.||_*, for a
/// general matrix: U * max(Sigma - lambda, 0) * V^T from a full SVD.
template <typename Derived>
DenseMatrix<typename Derived::Scalar> svt(const Eigen::MatrixBase<Derived> &m,
                                          typename Derived::Scalar lambda) {
    using Scalar = typename Derived::Scalar;
    if (!(lambda >= 0))
        throw ParameterError("svt: lambda must be nonnegative");
    if (m.size() == 0)
        return m;
    Eigen::JacobiSVD<DenseMatrix<Scalar>> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success)
        throw NumericalError("svt: SVD did not converge");
    const auto shrunk = (svd.singularValues().array() - lambda).max(Scalar(0)).matrix();
    return svd.matrixU() * shrunk.asDiagonal() * svd.matrixV().transpose();
}

/// Singular value thresholding specialised to skew input.
///
/// i*M is Hermitian with real eigenvalues +-sigma_k, so a Hermitian
/// eigendecomposition replaces the SVD. The result is antisymmetrized exactly.
template <typename Scalar>
SkewMatrix<Scalar> svt(const SkewMatrix<Scalar> &m, Scalar lambda,
                       Index *rank_out = nullptr) {
    using Complex = std::complex<Scalar>;
    using CMatrix = DenseMatrix<Complex>;
    if (!(lambda >= 0))
        throw ParameterError("svt: lambda must be nonnegative");
    const Index n = m.n();
    if (n == 0) {
        if (rank_out)
            *rank_out = 0;
        return m;
    }
    const CMatrix h = Complex(0, 1) * m.matrix().template cast<Complex>();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    if (es.info() != Eigen::Success)
        throw NumericalError("svt: Hermitian eigensolver did not converge");
    const auto &ev = es.eigenvalues();
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> shrunk(n);
    Index rank = 0;
    for (Index k = 0; k < n; ++k) {
        const Scalar a = std::abs(ev(k)) - lambda;
        shrunk(k) = a > 0 ? (ev(k) > 0 ? a : -a) : Scalar(0);
        if (a > 0)
            ++rank;
    }
    if (rank_out)
        *rank_out = rank;
    if (rank == 0)
        return SkewMatrix<Scalar>(n);
    // M = -i * V diag(ev) V^*; the real part of -i * X is Im(X).
    Index kept = 0;
    CMatrix vk(n, rank);
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> dk(rank);
    for (Index k = 0; k < n; ++k) {
        if (shrunk(k) != 0) {
            vk.col(kept) = es.eigenvectors().col(k);
            dk(kept) = shrunk(k);
            ++kept;
        }
    }
    const CMatrix back = vk * dk.template cast<Complex>().asDiagonal() * vk.adjoint();
    return SkewMatrix<Scalar>::project(DenseMatrix<Scalar>(back.imag()));
}

} // namespace skewnet
