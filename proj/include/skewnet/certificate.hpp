#pragma once

#include <optional>
#include <string>

#include "skewnet/decompose.hpp"
#include "skewnet/skew.hpp"

namespace skewnet {

struct Certificate {
    Eigen::MatrixXd Q;
    double inf_margin = 0;
    double spec_margin = 0;
    bool support_match = false;
    bool uv_match = false;
    bool valid = false;
    /// Empty when the dual was built; otherwise why it could not be.
    std::string reason;
};

/// Builds the unique dual Q in Omega(S_hat) + T(L_hat) with P_Omega(Q) =
/// gamma sign(S_hat) and P_T(Q) = U V^T, then checks the strict off-support
/// and off-tangent bounds that make (S_hat, L_hat) the unique optimum.
Certificate certify(const SkewMatrixd &C, const SkewMatrixd &S_hat, const SkewMatrixd &L_hat,
                    double gamma, double support_tol = 1e-9, double rank_tol = 1e-8);

/// (xi / (1 - 4 mu xi), (1 - 3 mu xi) / mu) when mu xi < 1/6.
std::optional<Interval> gamma_range_muxi(double mu, double xi);

/// (2 inc / (1 - 8 deg inc), (1 - 6 deg inc) / deg) when deg inc < 1/12.
std::optional<Interval> gamma_range_deg_inc(Index deg, double inc);

struct ConditionReport {
    double mu = 0;
    bool mu_upper_bound_only = false;
    double xi = 0;
    Index deg_max = 0;
    double inc = 0;
    double product_mu_xi = 0;
    double product_deg_inc = 0;
    std::optional<Interval> gamma_range_muxi;
    std::optional<Interval> gamma_range_deg_inc;
    bool transverse = false;
};

/// Identifiability quantities of a candidate pair (S, L), both nonzero.
ConditionReport condition_report(const SkewMatrixd &S, const SkewMatrixd &L,
                                 double support_tol = 1e-9, double rank_tol = 1e-8);

} // namespace skewnet
