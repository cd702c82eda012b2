#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "skewnet/ldm.hpp"

namespace skewnet {

/// Sample autocorrelation (1/(N-k)) sum_l x(l) x(l+k)^T of an n x N series.
Eigen::MatrixXd estimate_autocorr(const Eigen::MatrixXd &X, Index k);

/// Lags -p..p; the negative lags are transposes of the positive ones.
struct CorrelogramEstimate {
    Index p = 0;
    Index N = 0;
    std::vector<Eigen::MatrixXd> R_hat;

    const Eigen::MatrixXd &lag(Index k) const { return R_hat[static_cast<std::size_t>(k + p)]; }
    Index n() const { return R_hat.empty() ? 0 : R_hat.front().rows(); }
};

CorrelogramEstimate estimate_correlogram(const Eigen::MatrixXd &X, Index p);

/// Wraps known autocorrelations R(0..p) in the estimate layout.
CorrelogramEstimate correlogram_from(const std::vector<Eigen::MatrixXd> &R, Index N = 0);

/// sum_{k=-p}^{p} R(k) z^k. With R(k) = E x(l) x(l+k)^T this is the
/// truncation of (I - H)^{-1} Phi_e (I - H)^{-*}.
Eigen::MatrixXcd truncated_psdm(const CorrelogramEstimate &est, Complex z);

/// Hermitian inverse; rejects inputs whose smallest eigenvalue is not above
/// inv_tol times the largest.
Eigen::MatrixXcd ipsdm_estimate(const Eigen::MatrixXcd &phi, double inv_tol = 1e-8);

/// Model autocorrelations R(0..max_lag) from an inverse DFT of the exact
/// PSDM on `grid` points.
std::vector<Eigen::MatrixXd> exact_autocorr(const LdgModel &model, Index max_lag,
                                            int grid = 4096);

/// Envelope ||R(k)||_inf <= C1 rho^k.
struct MixingFit {
    double rho = 0;
    double C1 = 0;
};

/// rho from a log-linear least-squares fit of ||R(k)||_inf on lags 1..K, then
/// C1 raised until the envelope covers every supplied lag above roundoff.
MixingFit fit_mixing(const std::vector<Eigen::MatrixXd> &R);

/// Tail bound 2 C1 rho^{p+1} / (1 - rho) on the truncation error.
double truncation_bound(double rho, double C1, Index p);

/// Smallest p >= 0 with truncation_bound(rho, C1, p) <= eps_t.
Index truncation_order(double rho, double C1, double eps_t);

/// n^2 exp(-(N - p) min{eps1^2 / (32 (2p+1)^2 n^2 C1^2), eps1 / (8 (2p+1) n C1)}).
double estimation_failure_probability(double eps1, Index p, Index n, double C1, Index N);

/// Smallest N > p whose failure probability is at most delta.
Index sample_bound(double eps1, Index p, Index n, double C1, double delta);

struct ClassBounds {
    /// Eigenvalue moduli of (I - H(z))^{-1} lie in [l, L].
    double l = 0;
    double L = 0;
    /// Extreme noise spectrum values.
    double sigma_e_max = 0;
    double sigma_e_min = 0;
};

/// Class constants measured on a frequency grid of the unit circle.
ClassBounds class_bounds(const LdgModel &model, int grid_points = 64);

struct IpsdmBound {
    double value = 0;
    /// The denominator l^2 sigma_min^2 - sqrt(n) eps is not positive.
    bool vacuous = false;
};

/// Perturbation bound on ||Phi^{-1} - Phi_hat^{-1}||_inf given
/// ||Phi - Phi_hat||_inf <= eps.
IpsdmBound ipsdm_error_bound(double eps, Index n, const ClassBounds &bounds);

struct ErrorBudget {
    double rho = 0;
    double C1 = 0;
    double eps = 0;
    double eps1 = 0;
    Index p_min = 0;
    Index N_min = 0;
    double confidence = 0;
    ClassBounds class_bounds;
    IpsdmBound ipsdm_bound;
};

/// Truncation order for eps - eps1 and sample count for eps1 at confidence
/// 1 - delta. eps1 defaults to eps / 2.
ErrorBudget error_budget(const MixingFit &mix, const ClassBounds &bounds, Index n, double eps,
                         double delta, std::optional<double> eps1 = std::nullopt);

/// PSDM and IPSDM estimates on a list of frequencies.
struct SpectralBundle {
    Index p = 0;
    Index N = 0;
    std::vector<Complex> frequencies;
    std::vector<Eigen::MatrixXcd> psdm;
    std::vector<Eigen::MatrixXcd> ipsdm;
};

SpectralBundle estimate_spectra(const Eigen::MatrixXd &X, Index p,
                                const std::vector<Complex> &frequencies);

} // namespace skewnet
