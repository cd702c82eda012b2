#include "skewnet/certificate.hpp"

#include <cmath>

#include "skewnet/tangent.hpp"

namespace skewnet {

namespace {

std::vector<IndexPair> pairs_above(const SkewMatrixd &m, double threshold) {
    std::vector<IndexPair> out;
    for (Index i = 0; i < m.n(); ++i)
        for (Index j = i + 1; j < m.n(); ++j)
            if (std::abs(m(i, j)) > threshold)
                out.emplace_back(i, j);
    return out;
}

} // namespace

Certificate certify(const SkewMatrixd &C, const SkewMatrixd &S_hat, const SkewMatrixd &L_hat,
                    double gamma, double support_tol, double rank_tol) {
    if (C.n() != S_hat.n() || C.n() != L_hat.n())
        throw DimensionError("certify: C, S_hat and L_hat differ in dimension");
    if (!(gamma > 0))
        throw ParameterError("certify: gamma must be positive");
    const Index n = C.n();
    Certificate cert;
    cert.Q = Eigen::MatrixXd::Zero(n, n);

    const double scale = max_abs(C.matrix());
    if (scale == 0 || (C.matrix() - S_hat.matrix() - L_hat.matrix()).norm() >
                          1e-6 * C.matrix().norm()) {
        cert.reason = "S_hat + L_hat does not reproduce C";
        return cert;
    }
    const auto pairs = pairs_above(S_hat, support_tol * scale);
    const SparseTangentSpace omega(n, pairs);
    const double lmax = max_abs(L_hat.matrix());
    if (pairs.empty() || lmax <= support_tol * scale) {
        cert.reason = "degenerate component";
        return cert;
    }
    const auto svd = signed_svd(L_hat.matrix());
    const Index r = skew_rank(svd.sigma, rank_tol);
    const LowRankTangentSpace tspace(svd.U.leftCols(r));
    if (!transverse_intersection(omega, tspace).trivial) {
        cert.reason = "no unique dual";
        return cert;
    }

    Eigen::MatrixXd sign_part = Eigen::MatrixXd::Zero(n, n);
    for (const auto &[i, j] : pairs) {
        sign_part(i, j) = S_hat(i, j) > 0 ? gamma : -gamma;
        sign_part(j, i) = -sign_part(i, j);
    }
    const Eigen::MatrixXd uv = svd.U.leftCols(r) * svd.V.leftCols(r).transpose();

    // Q = A a + B b with orthonormal bases A of Omega and B of T; the two
    // projection conditions read [I, A^T B; B^T A, I] [a; b] = [A^T g; B^T e].
    const Eigen::MatrixXd A = omega.basis(), B = tspace.basis();
    const Index da = A.cols(), db = B.cols();
    const Eigen::MatrixXd cross = A.transpose() * B;
    Eigen::MatrixXd system(da + db, da + db);
    system << Eigen::MatrixXd::Identity(da, da), cross, cross.transpose(),
        Eigen::MatrixXd::Identity(db, db);
    Eigen::VectorXd rhs(da + db);
    rhs << A.transpose() * skew_coordinates(sign_part), B.transpose() * skew_coordinates(uv);
    const Eigen::VectorXd coef = system.colPivHouseholderQr().solve(rhs);
    const Eigen::VectorXd q = A * coef.head(da) + B * coef.tail(db);
    cert.Q = from_skew_coordinates(q, n);

    const double omega_err =
        max_abs((omega.project(cert.Q).matrix() - sign_part).eval());
    const double t_err = max_abs((tspace.project(cert.Q) - uv).eval());
    cert.support_match = omega_err <= 1e-8 * std::max(1.0, gamma);
    cert.uv_match = t_err <= 1e-8;

    cert.inf_margin = gamma - max_abs(omega.project_complement(cert.Q).matrix());
    cert.spec_margin = 1.0 - spectral_norm(tspace.project_complement(cert.Q));
    cert.valid = cert.support_match && cert.uv_match && cert.inf_margin > 0 && cert.spec_margin > 0;
    if (!cert.support_match || !cert.uv_match)
        cert.reason = "linear system inconsistent";
    else if (!cert.valid)
        cert.reason = "dual bounds violated";
    return cert;
}

std::optional<Interval> gamma_range_muxi(double mu, double xi) {
    if (!(mu > 0) || !(xi > 0))
        throw ParameterError("gamma_range_muxi: mu and xi must be positive");
    const double p = mu * xi;
    if (!(p < 1.0 / 6.0))
        return std::nullopt;
    return Interval{xi / (1.0 - 4.0 * p), (1.0 - 3.0 * p) / mu};
}

std::optional<Interval> gamma_range_deg_inc(Index deg, double inc) {
    if (deg < 1)
        throw ParameterError("gamma_range_deg_inc: empty support (deg = 0)");
    if (!(inc > 0 && inc <= 1.0))
        throw ParameterError("gamma_range_deg_inc: inc must lie in (0, 1]");
    const double p = static_cast<double>(deg) * inc;
    if (!(p < 1.0 / 12.0))
        return std::nullopt;
    return Interval{2.0 * inc / (1.0 - 8.0 * p), (1.0 - 6.0 * p) / static_cast<double>(deg)};
}

ConditionReport condition_report(const SkewMatrixd &S, const SkewMatrixd &L, double support_tol,
                                 double rank_tol) {
    if (S.n() != L.n())
        throw DimensionError("condition_report: S and L differ in dimension");
    ConditionReport rep;
    const auto mu = mu_exact(S, support_tol);
    rep.mu = mu.value;
    rep.mu_upper_bound_only = mu.upper_bound_only;
    const auto tspace = LowRankTangentSpace::of(L, rank_tol);
    rep.xi = xi_exact(tspace).value;
    rep.deg_max = deg_max(S, support_tol);
    rep.inc = incoherence(L, rank_tol);
    rep.product_mu_xi = rep.mu * rep.xi;
    rep.product_deg_inc = static_cast<double>(rep.deg_max) * rep.inc;
    if (rep.mu > 0 && rep.xi > 0)
        rep.gamma_range_muxi = gamma_range_muxi(rep.mu, rep.xi);
    if (rep.deg_max > 0 && rep.inc > 0)
        rep.gamma_range_deg_inc = gamma_range_deg_inc(rep.deg_max, rep.inc);
    rep.transverse =
        transverse_intersection(SparseTangentSpace::of(S, support_tol), tspace).trivial;
    return rep;
}

} // namespace skewnet
