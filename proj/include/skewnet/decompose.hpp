#pragma once

#include <optional>
#include <string>
#include <vector>

#include "skewnet/skew.hpp"

namespace skewnet {

struct SolverOptions {
    int max_iter = 100000;
    /// ||C - S - L||_F <= primal_tol * ||C||_F.
    double primal_tol = 1e-7;
    /// ||S_k - S_{k-1}||_F + ||L_k - L_{k-1}||_F <= dual_tol * ||C||_F.
    double dual_tol = 1e-9;
};

/// Iterate state carried between solves, e.g. along a penalty sweep.
struct WarmStart {
    SkewMatrixd S;
    SkewMatrixd L;
    Eigen::MatrixXd Y;
    double rho = 0;
};

struct DecompositionSolution {
    SkewMatrixd S_hat;
    SkewMatrixd L_hat;
    double t = 0;
    double gamma = 0;
    int iterations = 0;
    double primal_residual = 0;
    bool converged = false;
    /// Final ADMM state, scaled to the input.
    WarmStart state;
};

/// Minimizes t ||S||_1 + (1 - t) ||L||_* subject to S + L = C over skew pairs.
DecompositionSolution solve_decomposition(const SkewMatrixd &C, double t,
                                          const SolverOptions &opts = {},
                                          const WarmStart *start = nullptr);

/// ||S_prev - S_cur||_F + ||L_prev - L_cur||_F.
double compute_diff(const DecompositionSolution &prev, const DecompositionSolution &cur);

/// ||S - S_true||_F / ||S_true||_F + ||L - L_true||_F / ||L_true||_F.
double compute_tol(const DecompositionSolution &sol, const SkewMatrixd &S_true,
                   const SkewMatrixd &L_true);

struct SweepPoint {
    double t;
    DecompositionSolution solution;
    /// Zero at the first grid point, which has no predecessor.
    double diff;
};

struct Interval {
    double lo;
    double hi;
    double width() const { return hi - lo; }
    bool contains(double x) const { return lo <= x && x <= hi; }
};

struct SweepOptions {
    SolverOptions solver;
    /// Relative to ||C||_F.
    double zero_tol = 1e-6;
    /// Minimum number of consecutive grid points in a zero region.
    int min_region_points = 2;
    double fallback_lo = 0.26;
    double fallback_hi = 0.40;
    /// Start each solve from the previous grid point's iterate.
    bool warm_start = true;
};

struct SweepResult {
    double epsilon = 0;
    std::vector<SweepPoint> points;
    std::vector<Interval> zero_regions;
    std::optional<double> selected_t;
    /// False when selected_t comes from the fallback window rather than a
    /// middle zero region.
    bool certified = false;

    const SweepPoint &at(double t) const;
    const SweepPoint &selected() const;
};

/// Maximal runs of consecutive grid points whose diff is <= threshold.
std::vector<Interval> find_zero_regions(const std::vector<double> &ts,
                                        const std::vector<double> &diffs, double threshold,
                                        int min_points = 2);

/// Solves on the grid {eps, 2 eps, ..., 1} and locates the zero regions of diff_t.
SweepResult sweep_t(const SkewMatrixd &C, double epsilon, const SweepOptions &opts = {});

} // namespace skewnet
