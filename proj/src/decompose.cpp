#include "skewnet/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "skewnet/prox.hpp"

namespace skewnet {

DecompositionSolution solve_decomposition(const SkewMatrixd &C, double t,
                                          const SolverOptions &opts, const WarmStart *start) {
    if (!(t >= 0.0 && t <= 1.0))
        throw ParameterError("solve_decomposition: t must lie in [0, 1]");
    if (opts.max_iter < 1 || !(opts.primal_tol > 0) || !(opts.dual_tol > 0))
        throw ParameterError("solve_decomposition: invalid solver options");
    SkewMatrixd::checked(C.matrix());

    const Index n = C.n();
    DecompositionSolution out;
    out.t = t;
    out.gamma = t < 1.0 ? t / (1.0 - t) : std::numeric_limits<double>::infinity();

    const double scale = max_abs(C.matrix());
    if (scale == 0.0) {
        out.S_hat = out.L_hat = SkewMatrixd(n);
        out.converged = true;
        out.state = {out.S_hat, out.L_hat, Eigen::MatrixXd::Zero(n, n), 1.0};
        return out;
    }

    // Work on C / max|C|; the program is positively homogeneous, so the
    // solution scales back exactly and the dual variable is scale-free.
    const SkewMatrixd Cn = (1.0 / scale) * C;
    const double cnorm = Cn.matrix().norm();
    SkewMatrixd S(n), L(n);
    Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(n, n);
    double rho = 1.0;
    if (start && start->S.n() == n && start->L.n() == n && start->Y.rows() == n) {
        S = (1.0 / scale) * start->S;
        L = (1.0 / scale) * start->L;
        Y = start->Y;
        if (start->rho > 0)
            rho = start->rho * scale;
    }

    int it = 0;
    double primal = 0.0;
    bool converged = false;
    for (it = 1; it <= opts.max_iter; ++it) {
        const SkewMatrixd S_prev = S, L_prev = L;
        S = soft_threshold(SkewMatrixd::project(Cn.matrix() - L.matrix() + Y / rho), t / rho);
        L = svt(SkewMatrixd::project(Cn.matrix() - S.matrix() + Y / rho), (1.0 - t) / rho);
        const Eigen::MatrixXd residual = Cn.matrix() - S.matrix() - L.matrix();
        Y = SkewMatrixd::project(Y + rho * residual).matrix();

        primal = residual.norm();
        const double dL = (L.matrix() - L_prev.matrix()).norm();
        const double change = (S.matrix() - S_prev.matrix()).norm() + dL;
        if (primal <= opts.primal_tol * cnorm && change <= opts.dual_tol * cnorm) {
            converged = true;
            break;
        }
        const double dual = rho * dL;
        if (it % 10 == 0) {
            if (primal > 10.0 * dual)
                rho *= 2.0;
            else if (dual > 10.0 * primal)
                rho /= 2.0;
        }
    }

    out.S_hat = scale * S;
    out.L_hat = scale * L;
    out.iterations = std::min(it, opts.max_iter);
    out.primal_residual = (C.matrix() - out.S_hat.matrix() - out.L_hat.matrix()).norm();
    out.converged = converged;
    out.state = {out.S_hat, out.L_hat, Y, rho / scale};
    return out;
}

double compute_diff(const DecompositionSolution &prev, const DecompositionSolution &cur) {
    if (prev.S_hat.n() != cur.S_hat.n() || prev.L_hat.n() != cur.L_hat.n())
        throw DimensionError("compute_diff: solutions have different dimensions");
    return (prev.S_hat.matrix() - cur.S_hat.matrix()).norm() +
           (prev.L_hat.matrix() - cur.L_hat.matrix()).norm();
}

double compute_tol(const DecompositionSolution &sol, const SkewMatrixd &S_true,
                   const SkewMatrixd &L_true) {
    if (sol.S_hat.n() != S_true.n() || sol.L_hat.n() != L_true.n())
        throw DimensionError("compute_tol: ground truth has a different dimension");
    const double ns = S_true.matrix().norm(), nl = L_true.matrix().norm();
    if (ns == 0.0 || nl == 0.0)
        throw DomainError("compute_tol: relative error against a zero ground-truth component");
    return (sol.S_hat.matrix() - S_true.matrix()).norm() / ns +
           (sol.L_hat.matrix() - L_true.matrix()).norm() / nl;
}

std::vector<Interval> find_zero_regions(const std::vector<double> &ts,
                                        const std::vector<double> &diffs, double threshold,
                                        int min_points) {
    if (ts.size() != diffs.size())
        throw DimensionError("find_zero_regions: grid and diff lengths differ");
    std::vector<Interval> regions;
    std::size_t k = 1;
    while (k < ts.size()) {
        if (diffs[k] > threshold) {
            ++k;
            continue;
        }
        const std::size_t first = k - 1;
        while (k < ts.size() && diffs[k] <= threshold)
            ++k;
        const std::size_t last = k - 1;
        if (static_cast<int>(last - first + 1) >= min_points)
            regions.push_back({ts[first], ts[last]});
    }
    return regions;
}

const SweepPoint &SweepResult::at(double t) const {
    if (points.empty())
        throw ParameterError("SweepResult: no grid points");
    const auto it = std::min_element(points.begin(), points.end(), [t](const auto &a, const auto &b) {
        return std::abs(a.t - t) < std::abs(b.t - t);
    });
    return *it;
}

const SweepPoint &SweepResult::selected() const {
    if (!selected_t)
        throw DomainError("SweepResult: no t was selected");
    return at(*selected_t);
}

SweepResult sweep_t(const SkewMatrixd &C, double epsilon, const SweepOptions &opts) {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw ParameterError("sweep_t: epsilon must lie in (0, 1)");
    const int count = static_cast<int>(std::floor(1.0 / epsilon + 1e-9));
    if (count < 2)
        throw ParameterError("sweep_t: epsilon leaves fewer than 2 grid points");

    SweepResult result;
    result.epsilon = epsilon;
    std::vector<double> ts, diffs;
    const WarmStart *start = nullptr;
    for (int k = 1; k <= count; ++k) {
        const double t = std::min(1.0, k * epsilon);
        SweepPoint point{t, solve_decomposition(C, t, opts.solver, start), 0.0};
        if (!result.points.empty())
            point.diff = compute_diff(result.points.back().solution, point.solution);
        result.points.push_back(std::move(point));
        if (opts.warm_start)
            start = &result.points.back().solution.state;
        ts.push_back(t);
        diffs.push_back(result.points.back().diff);
    }

    const double threshold = opts.zero_tol * C.matrix().norm();
    result.zero_regions = find_zero_regions(ts, diffs, threshold, opts.min_region_points);

    const auto &regions = result.zero_regions;
    if (regions.size() >= 3) {
        // Interior regions only; the widest one wins, earliest on ties.
        const Interval *best = &regions[1];
        for (std::size_t r = 2; r + 1 < regions.size(); ++r)
            if (regions[r].width() > best->width() + 1e-12)
                best = &regions[r];
        result.selected_t = 0.5 * (best->lo + best->hi);
        result.certified = true;
    } else {
        double best_diff = std::numeric_limits<double>::infinity();
        for (std::size_t k = 1; k < result.points.size(); ++k) {
            const auto &p = result.points[k];
            if (p.t >= opts.fallback_lo - 1e-12 && p.t <= opts.fallback_hi + 1e-12 &&
                p.diff < best_diff) {
                best_diff = p.diff;
                result.selected_t = p.t;
            }
        }
        result.certified = false;
    }
    return result;
}

} // namespace skewnet
