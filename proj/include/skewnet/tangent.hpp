#pragma once

#include <Eigen/Dense>

#include <utility>
#include <vector>

#include "skewnet/skew.hpp"

namespace skewnet {

using IndexPair = std::pair<Index, Index>;

/// Coordinates of a skew matrix in the orthonormal basis (E_ij - E_ji)/sqrt(2),
/// i < j, ordered row-major over the strict upper triangle. The map is an
/// isometry from the Frobenius inner product onto R^{n(n-1)/2}.
Eigen::VectorXd skew_coordinates(const Eigen::MatrixXd &m);
Eigen::MatrixXd from_skew_coordinates(const Eigen::VectorXd &v, Index n);
Index skew_pair_index(Index i, Index j, Index n);

/// Support pairs of a skew matrix: |m_ij| > tol * max|m|, i < j.
std::vector<IndexPair> support_pairs(const SkewMatrixd &m, double support_tol = 1e-9);

/// Skew matrices supported on a fixed set of unordered index pairs.
class SparseTangentSpace {
  public:
    SparseTangentSpace(Index n, std::vector<IndexPair> support);
    static SparseTangentSpace of(const SkewMatrixd &s, double support_tol = 1e-9);

    Index n() const { return n_; }
    const std::vector<IndexPair> &support() const { return support_; }
    Index dimension() const { return static_cast<Index>(support_.size()); }
    bool contains(Index i, Index j) const;

    /// Orthonormal basis in skew coordinates, one column per support pair.
    Eigen::MatrixXd basis() const;

    /// Antisymmetrize, then zero every entry outside the support.
    SkewMatrixd project(const Eigen::MatrixXd &m) const;
    /// Antisymmetrize, then zero every entry inside the support.
    SkewMatrixd project_complement(const Eigen::MatrixXd &m) const;

  private:
    Index n_;
    std::vector<IndexPair> support_;
    std::vector<char> mask_;
};

/// Tangent space {U X^T - X U^T} of the skew rank-r manifold at a matrix whose
/// column space is spanned by the orthonormal columns of U.
class LowRankTangentSpace {
  public:
    explicit LowRankTangentSpace(Eigen::MatrixXd U);
    /// Column space of L from its signed SVD at relative rank tolerance,
    /// rounded up to even rank.
    static LowRankTangentSpace of(const SkewMatrixd &l, double rank_tol = 1e-8);

    Index n() const { return U_.rows(); }
    Index rank() const { return U_.cols(); }
    const Eigen::MatrixXd &U() const { return U_; }
    /// n r - r (r + 1) / 2.
    Index dimension() const;

    /// P_U M + M P_U - P_U M P_U.
    Eigen::MatrixXd project(const Eigen::MatrixXd &m) const;
    Eigen::MatrixXd project_complement(const Eigen::MatrixXd &m) const;

    /// Orthonormal basis in skew coordinates: the pairs u_a u_b^T - u_b u_a^T
    /// inside the column space and u_a w^T - w u_a^T against its complement.
    Eigen::MatrixXd basis() const;

  private:
    Eigen::MatrixXd U_;
    Eigen::MatrixXd P_;
};

Eigen::MatrixXd project_onto_T(const LowRankTangentSpace &space, const Eigen::MatrixXd &m);
SkewMatrixd project_onto_omega(const SparseTangentSpace &space, const Eigen::MatrixXd &m);

struct IntersectionReport {
    bool trivial;
    Index intersection_dim;
};

/// dim(Omega) + dim(T) - rank of the stacked bases.
IntersectionReport transverse_intersection(const SparseTangentSpace &omega,
                                           const LowRankTangentSpace &tspace,
                                           double rank_tol = 1e-8);

struct YoulaReport {
    bool holds;
    double deviation;
};

/// ||U U^T - V V^T||_F from the compact SVD of a nonzero skew matrix.
YoulaReport youla_projection_check(const SkewMatrixd &m);

/// Largest number of nonzeros in any row, with entries counted when
/// |m_ij| > support_tol * max|m|.
Index deg_max(const SkewMatrixd &m, double support_tol = 1e-9);

/// Largest row norm of U, i.e. max_k ||U U^T e_k||_2.
double incoherence(const SkewMatrixd &l, double rank_tol = 1e-8);

struct MuResult {
    double value;
    bool upper_bound_only;
    long long patterns;
};

/// Largest spectral norm over skew matrices supported on the support of s with
/// entries in [-1, 1]. Vertices of the box are enumerated component by
/// component of the support graph; beyond `max_patterns` the degree bound
/// deg_max(s) is returned instead.
MuResult mu_exact(const SkewMatrixd &s, double support_tol = 1e-9,
                  long long max_patterns = 1LL << 20);

struct XiResult {
    double value;
    IndexPair argmax;
    /// A unit-spectral-norm element of T whose entry at `argmax` equals `value`.
    Eigen::MatrixXd witness;
};

/// Largest entry of a unit-spectral-norm element of T(l).
///
/// For each pair the value is the dual restricted norm of P_T(B_ij), which is
/// min over z of ||P_T(B_ij) + z K_ij||_* where K_ij spans the skew matrices on
/// the orthogonal parts of e_i and e_j.
XiResult xi_exact(const SkewMatrixd &l, double rank_tol = 1e-8);
XiResult xi_exact(const LowRankTangentSpace &space);

} // namespace skewnet
