#include "skewnet/tangent.hpp"

#include "disjoint_sets.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace skewnet {

namespace {

const double kSqrt2 = std::sqrt(2.0);

void check_square(const Eigen::MatrixXd &m, Index n, const char *who) {
    if (m.rows() != n || m.cols() != n)
        throw DimensionError(std::string(who) + ": expected " + std::to_string(n) + "x" +
                             std::to_string(n) + ", got " + std::to_string(m.rows()) + "x" +
                             std::to_string(m.cols()));
}

double spectral_norm_skew(const Eigen::MatrixXd &m) {
    if (m.size() == 0)
        return 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.transpose() * m, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

} // namespace

Index skew_pair_index(Index i, Index j, Index n) {
    if (i > j)
        std::swap(i, j);
    return i * n - i * (i + 1) / 2 + (j - i - 1);
}

Eigen::VectorXd skew_coordinates(const Eigen::MatrixXd &m) {
    const Index n = m.rows();
    Eigen::VectorXd v(n * (n - 1) / 2);
    Index k = 0;
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j)
            v(k++) = kSqrt2 * 0.5 * (m(i, j) - m(j, i));
    return v;
}

Eigen::MatrixXd from_skew_coordinates(const Eigen::VectorXd &v, Index n) {
    if (v.size() != n * (n - 1) / 2)
        throw DimensionError("from_skew_coordinates: coordinate count does not match n");
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    Index k = 0;
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j) {
            m(i, j) = v(k++) / kSqrt2;
            m(j, i) = -m(i, j);
        }
    return m;
}

std::vector<IndexPair> support_pairs(const SkewMatrixd &m, double support_tol) {
    std::vector<IndexPair> out;
    const double scale = max_abs(m.matrix());
    if (scale == 0)
        return out;
    for (Index i = 0; i < m.n(); ++i)
        for (Index j = i + 1; j < m.n(); ++j)
            if (std::abs(m(i, j)) > support_tol * scale)
                out.emplace_back(i, j);
    return out;
}

// ---------------------------------------------------------------------------
// SparseTangentSpace

SparseTangentSpace::SparseTangentSpace(Index n, std::vector<IndexPair> support)
    : n_(n), mask_(static_cast<std::size_t>(n * n), 0) {
    if (n < 0)
        throw DimensionError("SparseTangentSpace: negative dimension");
    for (auto &[i, j] : support) {
        if (i == j)
            throw DomainError("SparseTangentSpace: diagonal pair (" + std::to_string(i) + ", " +
                              std::to_string(i) + ")");
        if (i < 0 || j < 0 || i >= n || j >= n)
            throw DimensionError("SparseTangentSpace: pair index out of range");
        if (i > j)
            std::swap(i, j);
    }
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end()), support.end());
    support_ = std::move(support);
    for (const auto &[i, j] : support_) {
        mask_[i * n_ + j] = 1;
        mask_[j * n_ + i] = 1;
    }
}

SparseTangentSpace SparseTangentSpace::of(const SkewMatrixd &s, double support_tol) {
    return SparseTangentSpace(s.n(), support_pairs(s, support_tol));
}

bool SparseTangentSpace::contains(Index i, Index j) const {
    return i >= 0 && j >= 0 && i < n_ && j < n_ && mask_[i * n_ + j];
}

Eigen::MatrixXd SparseTangentSpace::basis() const {
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n_ * (n_ - 1) / 2, dimension());
    for (Index k = 0; k < dimension(); ++k)
        b(skew_pair_index(support_[k].first, support_[k].second, n_), k) = 1.0;
    return b;
}

SkewMatrixd SparseTangentSpace::project(const Eigen::MatrixXd &m) const {
    check_square(m, n_, "project_onto_omega");
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n_, n_);
    for (const auto &[i, j] : support_) {
        out(i, j) = 0.5 * (m(i, j) - m(j, i));
        out(j, i) = -out(i, j);
    }
    return SkewMatrixd::project(out);
}

SkewMatrixd SparseTangentSpace::project_complement(const Eigen::MatrixXd &m) const {
    check_square(m, n_, "project_onto_omega_complement");
    SkewMatrixd s = project_skew(m);
    Eigen::MatrixXd out = s.matrix();
    for (const auto &[i, j] : support_) {
        out(i, j) = 0;
        out(j, i) = 0;
    }
    return SkewMatrixd::project(out);
}

// ---------------------------------------------------------------------------
// LowRankTangentSpace

LowRankTangentSpace::LowRankTangentSpace(Eigen::MatrixXd U) : U_(std::move(U)) {
    const Index r = U_.cols();
    if (r % 2 != 0)
        throw DomainError("LowRankTangentSpace: rank " + std::to_string(r) +
                          " is odd; skew matrices have even rank");
    if (r > U_.rows())
        throw DimensionError("LowRankTangentSpace: more columns than rows");
    const double dev = r == 0 ? 0.0
                              : (U_.transpose() * U_ - Eigen::MatrixXd::Identity(r, r))
                                    .cwiseAbs()
                                    .maxCoeff();
    if (dev > 1e-10)
        throw DomainError("LowRankTangentSpace: columns of U are not orthonormal (deviation " +
                          std::to_string(dev) + ")");
    P_ = U_ * U_.transpose();
}

LowRankTangentSpace LowRankTangentSpace::of(const SkewMatrixd &l, double rank_tol) {
    if (l.n() == 0)
        return LowRankTangentSpace(Eigen::MatrixXd(0, 0));
    const auto svd = signed_svd(l.matrix());
    const Index r = skew_rank(svd.sigma, rank_tol);
    return LowRankTangentSpace(svd.U.leftCols(r));
}

Index LowRankTangentSpace::dimension() const {
    const Index n = U_.rows(), r = U_.cols();
    return n * r - r * (r + 1) / 2;
}

Eigen::MatrixXd LowRankTangentSpace::project(const Eigen::MatrixXd &m) const {
    check_square(m, n(), "project_onto_T");
    const Eigen::MatrixXd pm = P_ * m;
    return pm + m * P_ - pm * P_;
}

Eigen::MatrixXd LowRankTangentSpace::project_complement(const Eigen::MatrixXd &m) const {
    return m - project(m);
}

Eigen::MatrixXd LowRankTangentSpace::basis() const {
    const Index n = U_.rows(), r = U_.cols();
    Eigen::MatrixXd complement(n, n - r);
    if (n > r) {
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(U_);
        const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
        complement = q.rightCols(n - r);
    }
    Eigen::MatrixXd b(n * (n - 1) / 2, dimension());
    Index k = 0;
    auto push = [&](const Eigen::VectorXd &x, const Eigen::VectorXd &y) {
        const Eigen::MatrixXd g = (x * y.transpose() - y * x.transpose()) / kSqrt2;
        b.col(k++) = skew_coordinates(g);
    };
    for (Index a = 0; a < r; ++a)
        for (Index c = a + 1; c < r; ++c)
            push(U_.col(a), U_.col(c));
    for (Index a = 0; a < r; ++a)
        for (Index c = 0; c < n - r; ++c)
            push(U_.col(a), complement.col(c));
    return b;
}

Eigen::MatrixXd project_onto_T(const LowRankTangentSpace &space, const Eigen::MatrixXd &m) {
    return space.project(m);
}

SkewMatrixd project_onto_omega(const SparseTangentSpace &space, const Eigen::MatrixXd &m) {
    return space.project(m);
}

IntersectionReport transverse_intersection(const SparseTangentSpace &omega,
                                           const LowRankTangentSpace &tspace, double rank_tol) {
    if (omega.n() != tspace.n())
        throw DimensionError("transverse_intersection: spaces live in different dimensions");
    const Index d1 = omega.dimension(), d2 = tspace.dimension();
    if (d1 == 0 || d2 == 0)
        return {true, 0};
    Eigen::MatrixXd stacked(omega.n() * (omega.n() - 1) / 2, d1 + d2);
    stacked << omega.basis(), tspace.basis();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked);
    const auto &sv = svd.singularValues();
    Index rank = 0;
    for (Index k = 0; k < sv.size(); ++k)
        if (sv(k) > rank_tol * sv(0))
            ++rank;
    const Index dim = d1 + d2 - rank;
    return {dim == 0, dim};
}

YoulaReport youla_projection_check(const SkewMatrixd &m) {
    if (max_abs(m.matrix()) == 0)
        throw DomainError("youla_projection_check: zero matrix has no column space");
    const auto svd = signed_svd(m.matrix());
    const Index r = skew_rank(svd.sigma, 1e-8);
    const Eigen::MatrixXd u = svd.U.leftCols(r), v = svd.V.leftCols(r);
    const double dev = (u * u.transpose() - v * v.transpose()).norm();
    return {dev <= 1e-8 * static_cast<double>(r), dev};
}

Index deg_max(const SkewMatrixd &m, double support_tol) {
    std::vector<Index> deg(static_cast<std::size_t>(m.n()), 0);
    for (const auto &[i, j] : support_pairs(m, support_tol)) {
        ++deg[i];
        ++deg[j];
    }
    return deg.empty() ? 0 : *std::max_element(deg.begin(), deg.end());
}

double incoherence(const SkewMatrixd &l, double rank_tol) {
    if (max_abs(l.matrix()) == 0)
        throw DomainError("incoherence: zero matrix has no column space");
    const auto space = LowRankTangentSpace::of(l, rank_tol);
    return space.U().rowwise().norm().maxCoeff();
}

MuResult mu_exact(const SkewMatrixd &s, double support_tol, long long max_patterns) {
    const auto pairs = support_pairs(s, support_tol);
    if (pairs.empty())
        return {0.0, false, 0};

    detail::DisjointSets sets(s.n());
    for (const auto &[i, j] : pairs)
        sets.unite(i, j);
    std::vector<std::vector<IndexPair>> groups(static_cast<std::size_t>(s.n()));
    for (const auto &p : pairs)
        groups[sets.find(p.first)].push_back(p);

    long long total = 0;
    for (const auto &g : groups) {
        if (g.empty())
            continue;
        if (g.size() - 1 >= 62 || (1LL << (g.size() - 1)) > max_patterns - total)
            return {static_cast<double>(deg_max(s, support_tol)), true, 0};
        total += 1LL << (g.size() - 1);
    }

    // The spectral norm of a block-diagonal matrix is the largest block norm,
    // and flipping every sign leaves the norm unchanged.
    double best = 0.0;
    for (const auto &g : groups) {
        if (g.empty())
            continue;
        std::vector<Index> nodes;
        for (const auto &[i, j] : g) {
            nodes.push_back(i);
            nodes.push_back(j);
        }
        std::sort(nodes.begin(), nodes.end());
        nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
        auto local = [&](Index v) {
            return static_cast<Index>(std::lower_bound(nodes.begin(), nodes.end(), v) -
                                      nodes.begin());
        };
        const Index k = static_cast<Index>(nodes.size());
        const long long count = 1LL << (g.size() - 1);
        Eigen::MatrixXd block(k, k);
        for (long long mask = 0; mask < count; ++mask) {
            block.setZero();
            for (std::size_t e = 0; e < g.size(); ++e) {
                const double sign = e > 0 && ((mask >> (e - 1)) & 1) ? -1.0 : 1.0;
                const Index a = local(g[e].first), b = local(g[e].second);
                block(a, b) = sign;
                block(b, a) = -sign;
            }
            best = std::max(best, spectral_norm_skew(block));
        }
    }
    return {best, false, total};
}

XiResult xi_exact(const SkewMatrixd &l, double rank_tol) {
    if (max_abs(l.matrix()) == 0)
        throw DomainError("xi_exact: zero matrix has no tangent space");
    return xi_exact(LowRankTangentSpace::of(l, rank_tol));
}

XiResult xi_exact(const LowRankTangentSpace &space) {
    const Index n = space.n(), r = space.rank();
    if (r == 0)
        throw DomainError("xi_exact: tangent space of a zero matrix");
    const Eigen::MatrixXd &U = space.U();
    const Eigen::MatrixXd P = U * U.transpose();

    XiResult best{-1.0, {0, 1}, Eigen::MatrixXd::Zero(n, n)};
    for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
            // Reduced frame [U, f, g] with f, g an orthonormal basis of the
            // parts of e_i and e_j orthogonal to the column space.
            Eigen::MatrixXd frame(n, r + 2);
            frame.leftCols(r) = U;
            Index cols = r;
            for (Index idx : {i, j}) {
                Eigen::VectorXd v = -P.col(idx);
                v(idx) += 1.0;
                for (Index c = r; c < cols; ++c)
                    v -= frame.col(c).dot(v) * frame.col(c);
                const double nv = v.norm();
                if (nv > 1e-10) {
                    frame.col(cols++) = v / nv;
                }
            }
            const Eigen::MatrixXd w = frame.leftCols(cols);

            Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
            b(i, j) = 0.5;
            b(j, i) = -0.5;
            const Eigen::MatrixXd g = w.transpose() * space.project(b) * w;
            Eigen::MatrixXd k = Eigen::MatrixXd::Zero(cols, cols);
            if (cols == r + 2) {
                k(r, r + 1) = 1.0;
                k(r + 1, r) = -1.0;
            }
            auto objective = [&](double z) {
                Eigen::JacobiSVD<Eigen::MatrixXd> svd(g + z * k);
                return svd.singularValues().sum();
            };

            double z = 0.0;
            if (cols == r + 2) {
                // Golden-section search; the objective is convex in z and
                // any minimizer satisfies |z| <= ||g||_*.
                const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
                double lo = -objective(0.0) - 1.0, hi = -lo;
                double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
                double f1 = objective(x1), f2 = objective(x2);
                while (hi - lo > 1e-13 * (1.0 + std::abs(lo) + std::abs(hi))) {
                    if (f1 <= f2) {
                        hi = x2;
                        x2 = x1;
                        f2 = f1;
                        x1 = hi - phi * (hi - lo);
                        f1 = objective(x1);
                    } else {
                        lo = x1;
                        x1 = x2;
                        f1 = f2;
                        x2 = lo + phi * (hi - lo);
                        f2 = objective(x2);
                    }
                }
                z = 0.5 * (lo + hi);
            }
            const double value = objective(z);
            if (value > best.value) {
                const Eigen::MatrixXd a = g + z * k;
                Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
                const auto &sv = svd.singularValues();
                Index rank = 0;
                while (rank < sv.size() && sv(rank) > 1e-9 * std::max(1.0, sv(0)))
                    ++rank;
                // A subgradient of the nuclear norm at a with no component
                // along k lies in T and attains the value. When a is singular
                // the free block on its null space supplies that component.
                Eigen::MatrixXd polar =
                    svd.matrixU().leftCols(rank) * svd.matrixV().leftCols(rank).transpose();
                if (rank < cols && cols == r + 2) {
                    const Eigen::MatrixXd nul = svd.matrixV().rightCols(cols - rank);
                    const Eigen::MatrixXd k_null = nul * (nul.transpose() * k * nul) * nul.transpose();
                    const double kk = k_null.squaredNorm();
                    if (kk > 1e-20) {
                        const double c = -(polar.array() * k.array()).sum() / kk;
                        polar += c * k_null;
                    }
                }
                Eigen::MatrixXd witness = project_skew(Eigen::MatrixXd(w * polar * w.transpose())).matrix();
                const double wn = spectral_norm_skew(witness);
                if (wn > 1.0)
                    witness /= wn;
                best = {value, {i, j}, witness};
            }
        }
    }
    return best;
}

} // namespace skewnet
