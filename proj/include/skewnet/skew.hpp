#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <string>

#include "skewnet/errors.hpp"

namespace skewnet {

using Eigen::Index;

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Dense real skew-symmetric matrix.
///
/// Every construction path antisymmetrizes, so `m(i, j) == -m(j, i)` holds
/// bit-exactly and the diagonal is identically zero.
template <typename Scalar = double>
class SkewMatrix {
  public:
    using Matrix = DenseMatrix<Scalar>;

    SkewMatrix() = default;
    explicit SkewMatrix(Index n) : m_(Matrix::Zero(n, n)) {}

    /// Antisymmetric part (M - M^T) / 2 of a square matrix.
    template <typename Derived>
    static SkewMatrix project(const Eigen::MatrixBase<Derived> &m) {
        if (m.rows() != m.cols())
            throw DimensionError("project_skew: matrix is " + std::to_string(m.rows()) + "x" +
                                 std::to_string(m.cols()) + ", expected square");
        SkewMatrix s;
        s.m_ = (m - m.transpose()) / Scalar(2);
        s.m_.diagonal().setZero();
        return s;
    }

    /// Accepts a matrix that is already skew within `tol` (relative to its
    /// largest entry) and antisymmetrizes it exactly. Rejects anything else.
    template <typename Derived>
    static SkewMatrix checked(const Eigen::MatrixBase<Derived> &m, Scalar tol = Scalar(1e-10)) {
        if (m.rows() != m.cols())
            throw DimensionError("SkewMatrix: matrix is not square");
        const Scalar scale = std::max(Scalar(1), m.cwiseAbs().maxCoeff());
        const Scalar dev = (m + m.transpose()).cwiseAbs().maxCoeff();
        if (dev > tol * scale)
            throw DomainError("SkewMatrix: input is not skew-symmetric (|M + M^T|_max = " +
                              std::to_string(dev) + ")");
        return project(m);
    }

    static SkewMatrix zero(Index n) { return SkewMatrix(n); }

    Index n() const { return m_.rows(); }
    const Matrix &matrix() const { return m_; }
    Scalar operator()(Index i, Index j) const { return m_(i, j); }

    /// Sets the pair (i, j) = v, (j, i) = -v.
    void set(Index i, Index j, Scalar v) {
        if (i == j)
            throw DomainError("SkewMatrix::set: diagonal of a skew matrix is zero");
        m_(i, j) = v;
        m_(j, i) = -v;
    }

    friend SkewMatrix operator+(const SkewMatrix &a, const SkewMatrix &b) {
        check_same(a, b);
        SkewMatrix s;
        s.m_ = a.m_ + b.m_;
        return s;
    }
    friend SkewMatrix operator-(const SkewMatrix &a, const SkewMatrix &b) {
        check_same(a, b);
        SkewMatrix s;
        s.m_ = a.m_ - b.m_;
        return s;
    }
    friend SkewMatrix operator*(Scalar alpha, const SkewMatrix &a) {
        SkewMatrix s;
        s.m_ = alpha * a.m_;
        return s;
    }

  private:
    static void check_same(const SkewMatrix &a, const SkewMatrix &b) {
        if (a.n() != b.n())
            throw DimensionError("SkewMatrix: dimension mismatch " + std::to_string(a.n()) +
                                 " vs " + std::to_string(b.n()));
    }

    Matrix m_;
};

using SkewMatrixd = SkewMatrix<double>;

template <typename Derived>
SkewMatrix<typename Derived::Scalar> project_skew(const Eigen::MatrixBase<Derived> &m) {
    return SkewMatrix<typename Derived::Scalar>::project(m);
}

// Norms used throughout. Entrywise norms follow ||M||_1 = sum |m_ij| and
// ||M||_inf = max |m_ij|.

template <typename Derived>
typename Derived::RealScalar l1_norm(const Eigen::MatrixBase<Derived> &m) {
    return m.cwiseAbs().sum();
}

template <typename Derived>
typename Derived::RealScalar max_abs(const Eigen::MatrixBase<Derived> &m) {
    return m.size() == 0 ? typename Derived::RealScalar(0) : m.cwiseAbs().maxCoeff();
}

template <typename Derived>
typename Derived::RealScalar spectral_norm(const Eigen::MatrixBase<Derived> &m) {
    if (m.size() == 0)
        return 0;
    Eigen::JacobiSVD<DenseMatrix<typename Derived::Scalar>> svd(m);
    return svd.singularValues()(0);
}

template <typename Derived>
typename Derived::RealScalar nuclear_norm(const Eigen::MatrixBase<Derived> &m) {
    if (m.size() == 0)
        return 0;
    Eigen::JacobiSVD<DenseMatrix<typename Derived::Scalar>> svd(m);
    return svd.singularValues().sum();
}

/// Thin SVD with a reproducible sign convention: the first entry of each
/// left singular vector whose magnitude exceeds 1e-12 is made positive.
template <typename Scalar>
struct SignedSvd {
    DenseMatrix<Scalar> U;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> sigma;
    DenseMatrix<Scalar> V;
};

template <typename Derived>
SignedSvd<typename Derived::Scalar> signed_svd(const Eigen::MatrixBase<Derived> &m) {
    using Scalar = typename Derived::Scalar;
    Eigen::JacobiSVD<DenseMatrix<Scalar>> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success)
        throw NumericalError("signed_svd: SVD did not converge");
    SignedSvd<Scalar> out{svd.matrixU(), svd.singularValues(), svd.matrixV()};
    for (Index k = 0; k < out.U.cols(); ++k) {
        for (Index i = 0; i < out.U.rows(); ++i) {
            if (std::abs(out.U(i, k)) > Scalar(1e-12)) {
                if (out.U(i, k) < 0) {
                    out.U.col(k) *= -1;
                    out.V.col(k) *= -1;
                }
                break;
            }
        }
    }
    return out;
}

/// Number of singular values above `rel_tol * sigma_1`.
template <typename Scalar>
Index numerical_rank(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> &sigma, Scalar rel_tol) {
    if (sigma.size() == 0 || sigma(0) <= 0)
        return 0;
    Index r = 0;
    while (r < sigma.size() && sigma(r) > rel_tol * sigma(0))
        ++r;
    return r;
}

/// Numerical rank rounded up to the next even count. Nonzero singular values
/// of a real skew matrix come in equal pairs.
template <typename Scalar>
Index skew_rank(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> &sigma, Scalar rel_tol) {
    Index r = numerical_rank(sigma, rel_tol);
    if (r % 2 == 1)
        ++r;
    return std::min<Index>(r, sigma.size() - (sigma.size() % 2));
}

} // namespace skewnet
