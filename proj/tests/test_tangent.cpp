#include <doctest.h>

#include "oracles.hpp"
#include "skewnet/prox.hpp"
#include "skewnet/tangent.hpp"

using namespace skewnet;

namespace {

SkewMatrixd pair_matrix(Index n, std::vector<IndexPair> pairs, double v = 1.0) {
    SkewMatrixd m(n);
    for (auto [i, j] : pairs)
        m.set(i, j, v);
    return m;
}

bool exactly_skew(const Eigen::MatrixXd &m) {
    return (m + m.transpose()).cwiseAbs().maxCoeff() == 0.0 && m.diagonal().isZero(0.0);
}

} // namespace

TEST_CASE("project_skew removes the symmetric part") {
    CHECK(project_skew(Eigen::MatrixXd::Identity(3, 3)).matrix().isZero(0.0));
    Eigen::MatrixXd m(2, 2);
    m << 0, 2, 0, 0;
    Eigen::MatrixXd expect(2, 2);
    expect << 0, 1, -1, 0;
    CHECK(project_skew(m).matrix() == expect);

    oracle::Rng rng(3);
    const SkewMatrixd s = oracle::random_skew(6, rng);
    CHECK(project_skew(s.matrix()).matrix() == s.matrix());
    CHECK(exactly_skew(s.matrix()));
    CHECK_THROWS_AS(project_skew(Eigen::MatrixXd::Zero(2, 3)), DimensionError);
    CHECK_THROWS_AS(SkewMatrixd::checked(Eigen::MatrixXd::Identity(3, 3)), DomainError);
}

TEST_CASE("soft_threshold") {
    oracle::Rng rng(5);
    const SkewMatrixd s = oracle::random_skew(5, rng);
    CHECK(soft_threshold(s, 0.0).matrix() == s.matrix());
    Eigen::MatrixXd m(1, 2);
    m << 0.5, -3.0;
    const Eigen::MatrixXd out = soft_threshold(m, 1.0);
    CHECK(out(0, 0) == 0.0);
    CHECK(out(0, 1) == -2.0);
    CHECK(exactly_skew(soft_threshold(s, 0.3).matrix()));
    CHECK_THROWS_AS(soft_threshold(m, -1.0), ParameterError);
}

TEST_CASE("svt") {
    oracle::Rng rng(7);
    const SkewMatrixd s = oracle::random_skew(6, rng);
    CHECK((svt(s, 0.0).matrix() - s.matrix()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((svt(s.matrix(), 0.0) - s.matrix()).cwiseAbs().maxCoeff() < 1e-10);
    const double top = oracle::spectral(s.matrix());
    CHECK(svt(s, top).matrix().isZero(0.0));

    // sigma (u v^T - v u^T) has singular value sigma twice; shrinking by 1
    // leaves the same direction at sigma - 1.
    const Eigen::MatrixXd Q = oracle::random_orthonormal(4, 2, rng);
    const Eigen::MatrixXd base = Q.col(0) * Q.col(1).transpose() - Q.col(1) * Q.col(0).transpose();
    const SkewMatrixd two = project_skew(Eigen::MatrixXd(2.0 * base));
    Index rank = -1;
    const SkewMatrixd one = svt(two, 1.0, &rank);
    CHECK(rank == 2);
    CHECK((one.matrix() - base).cwiseAbs().maxCoeff() < 1e-12);
    // The general-matrix path agrees and is skew before re-antisymmetrization.
    const Eigen::MatrixXd general = svt(two.matrix(), 1.0);
    CHECK((general + general.transpose()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((general - base).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(exactly_skew(svt(s, 0.5).matrix()));
}

TEST_CASE("singular values of skew matrices come in pairs") {
    oracle::Rng rng(11);
    for (Index n : {4, 5, 8, 9}) {
        const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(oracle::random_skew(n, rng).matrix())
                                       .singularValues();
        for (Index k = 0; k + 1 < n; k += 2)
            CHECK(std::abs(sv(k) - sv(k + 1)) <= 1e-8 * sv(0));
        if (n % 2 == 1)
            CHECK(sv(n - 1) <= 1e-10 * sv(0));
    }
}

TEST_CASE("deg_max counts the busiest row") {
    CHECK(deg_max(SkewMatrixd(5)) == 0);
    CHECK(deg_max(pair_matrix(5, {{0, 1}})) == 1);
    CHECK(deg_max(pair_matrix(5, {{0, 1}, {0, 2}, {0, 3}})) == 3);
}

TEST_CASE("incoherence") {
    CHECK(incoherence(pair_matrix(5, {{0, 1}})) == doctest::Approx(1.0).epsilon(1e-12));
    oracle::Rng rng(13);
    CHECK(incoherence(oracle::random_skew(6, rng)) == doctest::Approx(1.0).epsilon(1e-10));

    // Circulant generator c_k = sin(2 pi k / n): rank 2 with column space
    // spanned by the Fourier pair, so every row of U has norm sqrt(2 / n).
    const Index n = 8;
    Eigen::MatrixXd C(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j)
            C(i, j) = std::sin(2 * M_PI * double((j - i + n) % n) / n);
    const double inc = incoherence(project_skew(C));
    CHECK(inc == doctest::Approx(std::sqrt(2.0 / n)).epsilon(1e-10));
    CHECK(inc < 1.0);
    CHECK_THROWS_AS(incoherence(SkewMatrixd(4)), DomainError);
}

TEST_CASE("mu_exact matches sign-pattern enumeration") {
    CHECK(mu_exact(pair_matrix(4, {{0, 1}})).value == doctest::Approx(1.0));
    CHECK(mu_exact(pair_matrix(4, {{0, 1}, {2, 3}})).value == doctest::Approx(1.0));
    CHECK(mu_exact(pair_matrix(4, {{0, 1}, {0, 2}, {0, 3}})).value ==
          doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));

    oracle::Rng rng(17);
    std::uniform_int_distribution<Index> node(0, 6);
    for (int trial = 0; trial < 20; ++trial) {
        std::set<IndexPair> pairs;
        while (pairs.size() < 6) {
            Index i = node(rng), j = node(rng);
            if (i != j)
                pairs.insert({std::min(i, j), std::max(i, j)});
        }
        const std::vector<IndexPair> list(pairs.begin(), pairs.end());
        const auto mu = mu_exact(pair_matrix(7, list, 0.7));
        CHECK_FALSE(mu.upper_bound_only);
        CHECK(mu.value == doctest::Approx(oracle::mu_brute(7, list)).epsilon(1e-10));
    }

    const auto capped = mu_exact(pair_matrix(4, {{0, 1}, {0, 2}, {0, 3}}), 1e-9, 2);
    CHECK(capped.upper_bound_only);
    CHECK(capped.value == 3.0);
}

TEST_CASE("xi_exact") {
    oracle::Rng rng(19);
    // Full rank: T is every skew matrix, and the largest entry of a unit
    // spectral norm skew matrix is 1.
    CHECK(xi_exact(oracle::random_skew(6, rng)).value == doctest::Approx(1.0).epsilon(1e-9));

    const SkewMatrixd e12 = pair_matrix(5, {{0, 1}});
    const double xi = xi_exact(e12).value;
    CHECK(xi <= 2.0 * incoherence(e12) + 1e-12);
    CHECK(xi == doctest::Approx(1.0).epsilon(1e-9));

    for (auto [n, r] : {std::pair<Index, Index>{5, 2}, {6, 2}, {7, 4}}) {
        const SkewMatrixd L = oracle::random_low_rank_skew(n, r, rng);
        const auto space = LowRankTangentSpace::of(L);
        const XiResult res = xi_exact(space);

        // The witness attains the value inside T with unit spectral norm.
        const Eigen::MatrixXd &W = res.witness;
        CHECK((space.project(W) - W).cwiseAbs().maxCoeff() < 1e-9);
        CHECK(oracle::spectral(W) == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(std::abs(W(res.argmax.first, res.argmax.second)) ==
              doctest::Approx(res.value).epsilon(1e-9));

        // Random search never beats it and comes close.
        const double lower = oracle::xi_lower_bound(space.U(), 2000, 3000, rng);
        CHECK(lower <= res.value + 1e-9);
        CHECK(lower >= res.value - 2e-2);
    }
}

TEST_CASE("tangent space dimensions") {
    oracle::Rng rng(23);
    for (auto [n, r] : {std::pair<Index, Index>{2, 2}, {4, 2}, {6, 2}, {6, 4}, {9, 4}, {10, 6}}) {
        const auto space = LowRankTangentSpace::of(oracle::random_low_rank_skew(n, r, rng));
        CHECK(space.rank() == r);
        const Index expect = n * r - r * (r + 1) / 2;
        CHECK(space.dimension() == expect);
        CHECK(space.basis().cols() == expect);
        CHECK(oracle::rank_of(oracle::tangent_generators(space.U())) == expect);
        const Eigen::MatrixXd B = space.basis();
        CHECK((B.transpose() * B - Eigen::MatrixXd::Identity(expect, expect)).cwiseAbs().maxCoeff() <
              1e-10);
    }
    const SparseTangentSpace omega(6, {{0, 1}, {2, 5}, {3, 4}});
    CHECK(omega.dimension() == 3);
    CHECK(omega.basis().cols() == 3);
}

TEST_CASE("projections") {
    oracle::Rng rng(29);
    const auto space = LowRankTangentSpace::of(oracle::random_low_rank_skew(7, 2, rng));
    const Eigen::MatrixXd M = oracle::gaussian(7, 7, rng);
    const Eigen::MatrixXd PM = project_onto_T(space, M);
    CHECK((project_onto_T(space, PM) - PM).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs((PM.array() * (M - PM).array()).sum()) < 1e-10);

    Eigen::MatrixXd U = Eigen::MatrixXd::Zero(4, 2);
    U(0, 0) = U(1, 1) = 1;
    const LowRankTangentSpace e12(U);
    CHECK(project_onto_T(e12, pair_matrix(4, {{2, 3}}).matrix()).isZero(1e-15));

    const SparseTangentSpace omega(4, {{0, 1}});
    Eigen::MatrixXd E = Eigen::MatrixXd::Zero(4, 4);
    E(0, 1) = 1;
    const SkewMatrixd half = project_onto_omega(omega, E);
    CHECK(half(0, 1) == 0.5);
    CHECK(half(1, 0) == -0.5);
    CHECK(project_onto_omega(omega, Eigen::MatrixXd::Identity(4, 4)).matrix().isZero(0.0));
    const SkewMatrixd inside = pair_matrix(4, {{0, 1}}, 2.0);
    CHECK(project_onto_omega(omega, inside.matrix()).matrix() == inside.matrix());
    CHECK_THROWS_AS(project_onto_T(space, Eigen::MatrixXd::Zero(3, 3)), DimensionError);
}

TEST_CASE("transverse_intersection") {
    Eigen::MatrixXd U34 = Eigen::MatrixXd::Zero(4, 2);
    U34(2, 0) = U34(3, 1) = 1;
    CHECK(transverse_intersection(SparseTangentSpace(4, {{0, 1}}), LowRankTangentSpace(U34)).trivial);

    const auto t12 = LowRankTangentSpace::of(pair_matrix(4, {{0, 1}}));
    const auto hit = transverse_intersection(SparseTangentSpace(4, {{0, 1}}), t12);
    CHECK_FALSE(hit.trivial);
    CHECK(hit.intersection_dim >= 1);

    oracle::Rng rng(31);
    const auto full = LowRankTangentSpace::of(oracle::random_skew(6, rng));
    const SparseTangentSpace three(6, {{0, 1}, {1, 2}, {4, 5}});
    CHECK(transverse_intersection(three, full).intersection_dim == 3);
}

TEST_CASE("transverse_intersection agrees with the stacked generator rank") {
    oracle::Rng rng(37);
    std::uniform_int_distribution<int> coin(0, 99);
    int nontrivial = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const Index n = 5 + trial % 4, r = trial % 3 == 0 ? 4 : 2;
        const auto space = LowRankTangentSpace::of(oracle::random_low_rank_skew(n, r, rng));
        const int density = 10 + 60 * (trial % 5) / 4;
        std::vector<IndexPair> pairs;
        for (Index i = 0; i < n; ++i)
            for (Index j = i + 1; j < n; ++j)
                if (coin(rng) < density)
                    pairs.emplace_back(i, j);
        const auto got = transverse_intersection(SparseTangentSpace(n, pairs), space);
        const Index want = oracle::intersection_dim(n, pairs, space.U());
        CHECK(got.intersection_dim == want);
        CHECK(got.trivial == (want == 0));
        nontrivial += want > 0;
    }
    CHECK(nontrivial > 10);
    CHECK(nontrivial < 90);
}

TEST_CASE("youla_projection_check") {
    const auto e12 = youla_projection_check(pair_matrix(3, {{0, 1}}));
    CHECK(e12.holds);
    CHECK(e12.deviation < 1e-12);
    oracle::Rng rng(41);
    for (int k = 0; k < 20; ++k) {
        const auto rep = youla_projection_check(oracle::random_low_rank_skew(10, 4, rng));
        CHECK(rep.holds);
        CHECK(rep.deviation < 1e-10);
    }
    CHECK_THROWS_AS(youla_projection_check(SkewMatrixd(4)), DomainError);
}
