#pragma once

// Reference computations shared by the unit tests and the acceptance runner.
// Each one takes a different route from the library code it checks.

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <set>
#include <tuple>
#include <utility>
#include <vector>

#include "skewnet/ldm.hpp"
#include "skewnet/skew.hpp"
#include "skewnet/tangent.hpp"

namespace oracle {

using skewnet::Index;
using Rng = std::mt19937_64;

inline Eigen::MatrixXd gaussian(Index rows, Index cols, Rng &rng) {
    std::normal_distribution<double> g;
    Eigen::MatrixXd m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i)
            m(i, j) = g(rng);
    return m;
}

inline skewnet::SkewMatrixd random_skew(Index n, Rng &rng) {
    return skewnet::project_skew(gaussian(n, n, rng));
}

inline Eigen::MatrixXd random_orthonormal(Index n, Index r, Rng &rng) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian(n, r, rng));
    return qr.householderQ() * Eigen::MatrixXd::Identity(n, r);
}

/// sum_k sigma_k (u_k v_k^T - v_k u_k^T) with orthonormal u's and v's.
inline skewnet::SkewMatrixd random_low_rank_skew(Index n, Index rank, Rng &rng,
                                                 double sigma_lo = 1.0, double sigma_hi = 2.0) {
    std::uniform_real_distribution<double> unit(sigma_lo, sigma_hi);
    const Eigen::MatrixXd Q = random_orthonormal(n, rank, rng);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (Index k = 0; k + 1 < rank; k += 2)
        m += unit(rng) * (Q.col(k) * Q.col(k + 1).transpose() -
                          Q.col(k + 1) * Q.col(k).transpose());
    return skewnet::project_skew(m);
}

/// Vectorized upper triangle, unscaled. A plain coordinate map, unlike the
/// library's orthonormal one; ranks are unaffected.
inline Eigen::VectorXd upper(const Eigen::MatrixXd &m) {
    const Index n = m.rows();
    Eigen::VectorXd v(n * (n - 1) / 2);
    Index k = 0;
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j)
            v(k++) = m(i, j);
    return v;
}

/// Every generator u_a e_m^T - e_m u_a^T of T, one column each.
inline Eigen::MatrixXd tangent_generators(const Eigen::MatrixXd &U) {
    const Index n = U.rows(), r = U.cols();
    Eigen::MatrixXd G(n * (n - 1) / 2, n * r);
    Index c = 0;
    for (Index a = 0; a < r; ++a)
        for (Index m = 0; m < n; ++m) {
            Eigen::MatrixXd X = Eigen::MatrixXd::Zero(n, r);
            X(m, a) = 1.0;
            G.col(c++) = upper(U * X.transpose() - X * U.transpose());
        }
    return G;
}

inline Eigen::MatrixXd pair_generators(Index n, const std::vector<skewnet::IndexPair> &pairs) {
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n * (n - 1) / 2, static_cast<Index>(pairs.size()));
    for (std::size_t c = 0; c < pairs.size(); ++c) {
        Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
        B(pairs[c].first, pairs[c].second) = 1;
        B(pairs[c].second, pairs[c].first) = -1;
        G.col(static_cast<Index>(c)) = upper(B);
    }
    return G;
}

inline Index rank_of(const Eigen::MatrixXd &m, double rel_tol = 1e-9) {
    if (m.size() == 0)
        return 0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto &s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0)
        return 0;
    Index r = 0;
    while (r < s.size() && s(r) > rel_tol * s(0))
        ++r;
    return r;
}

/// dim(Omega) + dim(T) - rank of the stacked generators.
inline Index intersection_dim(Index n, const std::vector<skewnet::IndexPair> &pairs,
                              const Eigen::MatrixXd &U) {
    const Eigen::MatrixXd T = tangent_generators(U);
    const Eigen::MatrixXd O = pair_generators(n, pairs);
    Eigen::MatrixXd both(T.rows(), T.cols() + O.cols());
    both << T, O;
    return rank_of(O) + rank_of(T) - rank_of(both);
}

inline double spectral(const Eigen::MatrixXd &m) {
    return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()(0);
}

/// Spectral-norm maximum over all sign patterns on the full support at once.
inline double mu_brute(Index n, const std::vector<skewnet::IndexPair> &pairs) {
    const std::size_t k = pairs.size();
    double best = 0;
    for (unsigned long long mask = 0; mask < (1ULL << k); ++mask) {
        Eigen::MatrixXd N = Eigen::MatrixXd::Zero(n, n);
        for (std::size_t b = 0; b < k; ++b) {
            const double s = (mask >> b) & 1ULL ? 1.0 : -1.0;
            N(pairs[b].first, pairs[b].second) = s;
            N(pairs[b].second, pairs[b].first) = -s;
        }
        best = std::max(best, spectral(N));
    }
    return best;
}

/// Largest entry over random unit-spectral-norm elements of T(U), followed by
/// a greedy random-perturbation ascent from the best sample.
inline double xi_lower_bound(const Eigen::MatrixXd &U, int samples, int ascent_steps, Rng &rng) {
    const Index n = U.rows(), r = U.cols();
    auto score = [&](const Eigen::MatrixXd &X) {
        const Eigen::MatrixXd N = U * X.transpose() - X * U.transpose();
        const double s = spectral(N);
        return s > 0 ? N.cwiseAbs().maxCoeff() / s : 0.0;
    };
    Eigen::MatrixXd best_X = gaussian(n, r, rng);
    double best = score(best_X);
    for (int k = 1; k < samples; ++k) {
        Eigen::MatrixXd X = gaussian(n, r, rng);
        const double s = score(X);
        if (s > best) {
            best = s;
            best_X = X;
        }
    }
    double step = 0.3 * best_X.norm();
    for (int k = 0; k < ascent_steps; ++k) {
        Eigen::MatrixXd X = best_X + step * gaussian(n, r, rng) / std::sqrt(double(n * r));
        const double s = score(X);
        if (s > best) {
            best = s;
            best_X = X;
        } else if (k % 50 == 49) {
            step *= 0.7;
        }
    }
    return best;
}

/// Normalized subgradient descent on t ||S||_1 + (1 - t) ||C - S||_* over
/// skew S with steps 0.5 / sqrt(k + 1); returns the best iterate seen.
inline std::pair<Eigen::MatrixXd, double> subgradient_reference(const Eigen::MatrixXd &C, double t,
                                                                int iters) {
    auto objective = [&](const Eigen::MatrixXd &S) {
        const Eigen::MatrixXd L = C - S;
        return t * S.cwiseAbs().sum() +
               (1 - t) * Eigen::JacobiSVD<Eigen::MatrixXd>(L).singularValues().sum();
    };
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(C.rows(), C.cols());
    Eigen::MatrixXd best = S;
    double best_val = objective(S);
    for (int k = 0; k < iters; ++k) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(C - S, Eigen::ComputeThinU | Eigen::ComputeThinV);
        Eigen::Index r = 0;
        const auto &sv = svd.singularValues();
        while (r < sv.size() && sv(r) > 1e-12 * std::max(1.0, sv(0)))
            ++r;
        Eigen::MatrixXd g = t * S.unaryExpr([](double x) { return double((x > 0) - (x < 0)); });
        if (r > 0)
            g -= (1 - t) * svd.matrixU().leftCols(r) * svd.matrixV().leftCols(r).transpose();
        g = 0.5 * (g - g.transpose());
        const double gn = g.norm();
        if (gn == 0)
            break;
        S -= (0.5 / std::sqrt(k + 1.0)) * g / gn;
        S = 0.5 * (S - S.transpose());
        const double v = objective(S);
        if (v < best_val) {
            best_val = v;
            best = S;
        }
    }
    return {best, best_val};
}

struct Instance {
    skewnet::SkewMatrixd S;
    skewnet::SkewMatrixd L;
    skewnet::SkewMatrixd C;
};

/// Random sparse part with `pairs` entries of magnitude in [1, 2] plus a
/// rank-2 part with singular values in [3, 4.5].
inline Instance planted(std::uint64_t seed, Index n = 20, std::size_t pairs = 6) {
    oracle::Rng rng(seed);
    std::uniform_int_distribution<Index> node(0, n - 1);
    std::uniform_real_distribution<double> mag(1.0, 2.0);
    std::bernoulli_distribution coin;
    skewnet::SkewMatrixd S(n);
    std::set<skewnet::IndexPair> used;
    while (used.size() < pairs) {
        const Index i = node(rng), j = node(rng);
        if (i == j || !used.insert({std::min(i, j), std::max(i, j)}).second)
            continue;
        S.set(std::min(i, j), std::max(i, j), (coin(rng) ? 1.0 : -1.0) * mag(rng));
    }
    const skewnet::SkewMatrixd L = random_low_rank_skew(n, 2, rng, 3.0, 4.5);
    return {S, L, S + L};
}

inline double decomposition_objective(const Eigen::MatrixXd &S, const Eigen::MatrixXd &L,
                                      double t) {
    return t * S.cwiseAbs().sum() +
           (1 - t) * Eigen::JacobiSVD<Eigen::MatrixXd>(L).singularValues().sum();
}

/// Hand-built model with the shared-filter edge form. Every node uses the
/// filter z^-1 + 0.25 z^-2 and unit white noise unless told otherwise.
inline skewnet::LdgModel make_model(Index n, const std::vector<std::pair<Index, Index>> &edges,
                                    std::vector<Index> hidden, double gain = 0.3,
                                    std::vector<double> taps = {0.0, 1.0, 0.25}) {
    std::vector<skewnet::EdgeFilter> ef;
    for (const auto &[from, to] : edges)
        ef.push_back({from, to, gain, {}});
    return skewnet::LdgModel(n, ef, std::vector<std::vector<double>>(n, taps),
                             std::vector<skewnet::NoiseSpec>(n), std::move(hidden));
}

} // namespace oracle
