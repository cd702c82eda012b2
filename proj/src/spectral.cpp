#include "skewnet/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "skewnet/errors.hpp"
#include "skewnet/skew.hpp"

namespace skewnet {

namespace {

void check_on_circle(Complex z, const char *who) {
    if (std::abs(std::abs(z) - 1.0) > 1e-12)
        throw DomainError(std::string(who) + ": z must lie on the unit circle");
}

double failure_rate(double eps1, Index p, Index n, double C1) {
    const double w = 2.0 * p + 1.0, nn = static_cast<double>(n);
    return std::min(eps1 * eps1 / (32.0 * w * w * nn * nn * C1 * C1), eps1 / (8.0 * w * nn * C1));
}

} // namespace

Eigen::MatrixXd estimate_autocorr(const Eigen::MatrixXd &X, Index k) {
    const Index n = X.rows(), N = X.cols();
    if (k < 0 || N - k < n || N - k < 1)
        throw ParameterError("estimate_autocorr: lag " + std::to_string(k) +
                             " needs N - k >= n (N = " + std::to_string(N) +
                             ", n = " + std::to_string(n) + ")");
    const Index m = N - k;
    return X.leftCols(m) * X.middleCols(k, m).transpose() / static_cast<double>(m);
}

CorrelogramEstimate estimate_correlogram(const Eigen::MatrixXd &X, Index p) {
    if (p < 0)
        throw ParameterError("estimate_correlogram: p must be nonnegative");
    std::vector<Eigen::MatrixXd> R;
    for (Index k = 0; k <= p; ++k)
        R.push_back(estimate_autocorr(X, k));
    return correlogram_from(R, X.cols());
}

CorrelogramEstimate correlogram_from(const std::vector<Eigen::MatrixXd> &R, Index N) {
    if (R.empty())
        throw DimensionError("correlogram_from: need at least R(0)");
    const Index n = R.front().rows();
    for (const auto &r : R)
        if (r.rows() != n || r.cols() != n)
            throw DimensionError("correlogram_from: lag matrices must all be n x n");
    CorrelogramEstimate est;
    est.p = static_cast<Index>(R.size()) - 1;
    est.N = N;
    for (Index k = est.p; k >= 1; --k)
        est.R_hat.push_back(R[k].transpose());
    est.R_hat.push_back(0.5 * (R[0] + R[0].transpose()));
    for (Index k = 1; k <= est.p; ++k)
        est.R_hat.push_back(R[k]);
    return est;
}

Eigen::MatrixXcd truncated_psdm(const CorrelogramEstimate &est, Complex z) {
    check_on_circle(z, "truncated_psdm");
    Eigen::MatrixXcd out = est.lag(0).cast<Complex>();
    Complex zk = 1.0;
    for (Index k = 1; k <= est.p; ++k) {
        zk *= z;
        out += est.lag(k).cast<Complex>() * zk + est.lag(-k).cast<Complex>() * std::conj(zk);
    }
    return 0.5 * (out + out.adjoint());
}

Eigen::MatrixXcd ipsdm_estimate(const Eigen::MatrixXcd &phi, double inv_tol) {
    if (phi.rows() != phi.cols())
        throw DimensionError("ipsdm_estimate: matrix must be square");
    const double scale = std::max(1.0, max_abs(phi));
    if (max_abs((phi - phi.adjoint()).eval()) > 1e-10 * scale)
        throw DomainError("ipsdm_estimate: matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (phi + phi.adjoint()));
    if (es.info() != Eigen::Success)
        throw NumericalError("ipsdm_estimate: eigensolver failed");
    const Eigen::VectorXd &lam = es.eigenvalues();
    const double top = lam.cwiseAbs().maxCoeff(), bottom = lam.minCoeff();
    if (!(bottom > inv_tol * top))
        throw ConditioningError("ipsdm_estimate: PSDM estimate is not safely positive definite",
                                bottom > 0 ? top / bottom : INFINITY);
    const Eigen::MatrixXcd &V = es.eigenvectors();
    Eigen::MatrixXcd inv = V * lam.cwiseInverse().cast<Complex>().asDiagonal() * V.adjoint();
    return 0.5 * (inv + inv.adjoint());
}

std::vector<Eigen::MatrixXd> exact_autocorr(const LdgModel &model, Index max_lag, int grid) {
    if (max_lag < 0 || grid < 2 * (max_lag + 1))
        throw ParameterError("exact_autocorr: grid too coarse for the requested lags");
    const Index n = model.n();
    std::vector<Eigen::MatrixXd> R(max_lag + 1, Eigen::MatrixXd::Zero(n, n));
    for (const Complex z : unit_grid(grid)) {
        const Eigen::MatrixXcd phi = psdm_exact(model, z);
        const Complex zinv = std::conj(z);
        Complex w = 1.0;
        for (Index k = 0; k <= max_lag; ++k) {
            R[k] += (phi * w).real();
            w *= zinv;
        }
    }
    for (auto &r : R)
        r /= grid;
    return R;
}

MixingFit fit_mixing(const std::vector<Eigen::MatrixXd> &R) {
    if (R.size() < 3)
        throw ParameterError("fit_mixing: need autocorrelations for at least lags 0..2");
    std::vector<double> norms;
    for (const auto &r : R)
        norms.push_back(max_abs(r));
    if (!(norms[0] > 0))
        throw DomainError("fit_mixing: R(0) vanishes");
    // Lags lost in roundoff carry no decay information.
    const double floor = 1e-12 * norms[0];
    double sk = 0, sy = 0, skk = 0, sky = 0;
    int count = 0;
    for (std::size_t k = 1; k < norms.size(); ++k)
        if (norms[k] > floor) {
            const double y = std::log(norms[k]);
            sk += k;
            sy += y;
            skk += static_cast<double>(k * k);
            sky += k * y;
            ++count;
        }
    MixingFit fit;
    if (count < 2) {
        fit.rho = 1e-6;
    } else {
        const double slope = (count * sky - sk * sy) / (count * skk - sk * sk);
        fit.rho = std::clamp(std::exp(slope), 1e-6, 1.0);
    }
    if (!(fit.rho < 1))
        throw DomainError("fit_mixing: autocorrelations do not decay");
    for (std::size_t k = 0; k < norms.size(); ++k)
        if (k == 0 || norms[k] > floor)
            fit.C1 = std::max(fit.C1, norms[k] / std::pow(fit.rho, static_cast<double>(k)));
    return fit;
}

double truncation_bound(double rho, double C1, Index p) {
    return 2.0 * C1 * std::pow(rho, static_cast<double>(p + 1)) / (1.0 - rho);
}

Index truncation_order(double rho, double C1, double eps_t) {
    if (!(rho > 0 && rho < 1) || !(C1 > 0) || !(eps_t > 0))
        throw ParameterError("truncation_order: need 0 < rho < 1, C1 > 0, eps > 0");
    const double guess = std::log((1.0 - rho) * eps_t / (2.0 * C1)) / std::log(rho) - 1.0;
    Index p = guess > 0 ? static_cast<Index>(std::ceil(guess)) : 0;
    while (truncation_bound(rho, C1, p) > eps_t)
        ++p;
    while (p > 0 && truncation_bound(rho, C1, p - 1) <= eps_t)
        --p;
    return p;
}

double estimation_failure_probability(double eps1, Index p, Index n, double C1, Index N) {
    const double nn = static_cast<double>(n);
    return nn * nn * std::exp(-static_cast<double>(N - p) * failure_rate(eps1, p, n, C1));
}

Index sample_bound(double eps1, Index p, Index n, double C1, double delta) {
    if (!(eps1 > 0) || p < 0 || n < 1 || !(C1 > 0) || !(delta > 0 && delta <= 1))
        throw ParameterError("sample_bound: need eps1, C1 > 0, p >= 0, n >= 1, 0 < delta <= 1");
    if (delta >= 1)
        return p + 1;
    const double nn = static_cast<double>(n);
    const double need = std::log(nn * nn / delta) / failure_rate(eps1, p, n, C1);
    if (!(need < 1e15))
        throw ParameterError("sample_bound: required sample count overflows");
    Index N = p + std::max<Index>(1, static_cast<Index>(std::ceil(need)));
    while (estimation_failure_probability(eps1, p, n, C1, N) > delta)
        ++N;
    while (N > p + 1 && estimation_failure_probability(eps1, p, n, C1, N - 1) <= delta)
        --N;
    return N;
}

ClassBounds class_bounds(const LdgModel &model, int grid_points) {
    ClassBounds b;
    b.l = INFINITY;
    b.sigma_e_min = INFINITY;
    const Index n = model.n();
    for (const Complex z : unit_grid(grid_points)) {
        const Eigen::MatrixXcd ih = Eigen::MatrixXcd::Identity(n, n) - eval_H(model, z);
        const Eigen::VectorXd mod = Eigen::ComplexEigenSolver<Eigen::MatrixXcd>(ih, false)
                                        .eigenvalues()
                                        .cwiseAbs();
        if (!(mod.minCoeff() > 0))
            throw ConditioningError("class_bounds: I - H(z) is singular on the grid", INFINITY);
        b.l = std::min(b.l, 1.0 / mod.maxCoeff());
        b.L = std::max(b.L, 1.0 / mod.minCoeff());
        const Eigen::VectorXd d = noise_spectrum(model, z);
        b.sigma_e_min = std::min(b.sigma_e_min, d.minCoeff());
        b.sigma_e_max = std::max(b.sigma_e_max, d.maxCoeff());
    }
    return b;
}

IpsdmBound ipsdm_error_bound(double eps, Index n, const ClassBounds &b) {
    if (!(eps >= 0) || n < 1 || !(b.l > 0) || !(b.L >= b.l) || !(b.sigma_e_min > 0) ||
        !(b.sigma_e_max >= b.sigma_e_min))
        throw ParameterError("ipsdm_error_bound: invalid class bounds or eps");
    const double sn = std::sqrt(static_cast<double>(n));
    const double l2s2 = b.l * b.l * b.sigma_e_min * b.sigma_e_min;
    const double den = l2s2 - sn * eps;
    if (!(den > 0))
        return {std::numeric_limits<double>::infinity(), true};
    const double lead = sn * b.L * b.L * b.sigma_e_max * b.sigma_e_max / (l2s2 * l2s2);
    return {lead * sn * eps / den, false};
}

ErrorBudget error_budget(const MixingFit &mix, const ClassBounds &bounds, Index n, double eps,
                         double delta, std::optional<double> eps1) {
    ErrorBudget out;
    out.rho = mix.rho;
    out.C1 = mix.C1;
    out.eps = eps;
    out.eps1 = eps1.value_or(eps / 2);
    if (!(out.eps1 > 0 && out.eps1 < eps))
        throw ParameterError("error_budget: need 0 < eps1 < eps");
    out.p_min = truncation_order(mix.rho, mix.C1, eps - out.eps1);
    out.N_min = sample_bound(out.eps1, out.p_min, n, mix.C1, delta);
    out.confidence = 1.0 - delta;
    out.class_bounds = bounds;
    out.ipsdm_bound = ipsdm_error_bound(eps, n, bounds);
    return out;
}

SpectralBundle estimate_spectra(const Eigen::MatrixXd &X, Index p,
                                const std::vector<Complex> &frequencies) {
    SpectralBundle out;
    const auto est = estimate_correlogram(X, p);
    out.p = p;
    out.N = X.cols();
    out.frequencies = frequencies;
    for (const Complex z : frequencies) {
        out.psdm.push_back(truncated_psdm(est, z));
        out.ipsdm.push_back(ipsdm_estimate(out.psdm.back()));
    }
    return out;
}

} // namespace skewnet
