#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "skewnet/tangent.hpp"

namespace skewnet {

using Complex = std::complex<double>;

/// Directed edge from -> to. Without explicit taps the transfer function is
/// gain * f_to(z), the shared filter of the target node; explicit taps give the
/// edge its own FIR response gain * sum_m taps[m] z^{-m}.
struct EdgeFilter {
    Index from;
    Index to;
    double gain;
    std::vector<double> taps;
};

/// Per-node noise: white with the given variance, or unit white noise shaped
/// by an FIR filter, in which case Phi_e,k(z) = |sum_m taps[m] z^{-m}|^2.
struct NoiseSpec {
    double variance = 1.0;
    std::vector<double> taps;
    bool shaped() const { return !taps.empty(); }
};

/// FIR response sum_m taps[m] z^{-m}.
Complex eval_fir(const std::vector<double> &taps, Complex z);

/// Linear dynamical graph model x = H(z) x + e with diagonal noise spectrum.
class LdgModel {
  public:
    LdgModel() = default;
    LdgModel(Index n, std::vector<EdgeFilter> edges, std::vector<std::vector<double>> node_filters,
             std::vector<NoiseSpec> noise, std::vector<Index> hidden);

    Index n() const { return n_; }
    const std::vector<EdgeFilter> &edges() const { return edges_; }
    const std::vector<double> &node_filter(Index k) const { return node_filters_[k]; }
    const std::vector<std::vector<double>> &node_filters() const { return node_filters_; }
    const NoiseSpec &noise(Index k) const { return noise_[k]; }
    const std::vector<NoiseSpec> &noise() const { return noise_; }
    const std::vector<Index> &hidden() const { return hidden_; }
    const std::vector<Index> &observed() const { return observed_; }
    bool is_hidden(Index k) const { return hidden_mask_[k]; }
    Index n_hidden() const { return static_cast<Index>(hidden_.size()); }
    Index n_observed() const { return static_cast<Index>(observed_.size()); }

    /// Transfer function H_{to,from}(z) of one edge.
    Complex edge_response(const EdgeFilter &e, Complex z) const;
    /// Noise spectrum Phi_e,k(z), real and positive on the unit circle.
    double noise_psd(Index k, Complex z) const;
    /// Lag-l coefficient matrix of H, H(z) = sum_l H_l z^{-l}.
    Eigen::MatrixXd lag_matrix(Index l) const;
    Index max_lag() const;
    /// All edges use the shared node filter with positive gain.
    bool shared_phase_form() const;

  private:
    Index n_ = 0;
    std::vector<EdgeFilter> edges_;
    std::vector<std::vector<double>> node_filters_;
    std::vector<NoiseSpec> noise_;
    std::vector<Index> hidden_;
    std::vector<Index> observed_;
    std::vector<char> hidden_mask_;
};

Eigen::MatrixXcd eval_H(const LdgModel &model, Complex z);
Eigen::VectorXd noise_spectrum(const LdgModel &model, Complex z);

/// Phi_x = (I - H)^{-1} Phi_e (I - H)^{-*}.
Eigen::MatrixXcd psdm_exact(const LdgModel &model, Complex z);
/// Phi_x^{-1} = (I - H^*) Phi_e^{-1} (I - H).
Eigen::MatrixXcd ipsdm_exact(const LdgModel &model, Complex z);
/// Schur complement K_oo - K_oh K_hh^{-1} K_ho of K = Phi_x^{-1}.
Eigen::MatrixXcd ipsdm_observed(const LdgModel &model, Complex z);

struct GroundTruthDecomposition {
    Eigen::MatrixXcd S;
    Eigen::MatrixXcd L;
    Eigen::MatrixXcd Psi;
    Eigen::MatrixXcd Lambda;
    Complex z;
};

/// Sparse and low-rank parts of the observed IPSDM, from the block structure
/// of H and Phi_e.
GroundTruthDecomposition sl_ground_truth(const LdgModel &model, Complex z);

/// Undirected edge (i, j) stored with i < j.
using UEdge = std::pair<Index, Index>;
inline UEdge uedge(Index a, Index b) { return a < b ? UEdge{a, b} : UEdge{b, a}; }

struct GraphViews {
    Index n = 0;
    std::vector<std::set<Index>> parents;
    std::vector<std::set<Index>> children;
    std::vector<std::set<Index>> spouses;
    std::set<UEdge> top;
    std::set<UEdge> kin;
    std::set<UEdge> strict_spouse_edges;
    /// Hop distance in top(G); -1 when unreachable.
    std::vector<std::vector<int>> hop;

    std::set<Index> strict_parents(Index k) const;
    std::set<Index> strict_spouses(Index k) const;
    std::set<Index> blanket(Index k) const;
};

GraphViews derive_views(Index n, const std::vector<std::pair<Index, Index>> &directed);
GraphViews derive_views(const LdgModel &model);
/// Views of the graph restricted to the observed nodes, indexed by position
/// in model.observed().
GraphViews observed_views(const LdgModel &model);

/// Evaluation grid e^{j 2 pi m / points}, m = 0..points-1.
std::vector<Complex> unit_grid(int points);

struct AssumptionCheck {
    std::string name;
    bool holds = true;
    std::vector<std::string> witnesses;
};

struct AssumptionReport {
    AssumptionCheck well_posed;
    AssumptionCheck detectable;
    /// Assumptions 1 to 5 in order.
    std::vector<AssumptionCheck> assumptions;
    bool all_hold() const;
};

/// Numerical checks on a frequency grid: well-posedness (min |det(I - H)|),
/// detectability (min noise spectrum), and Assumptions 1-5. The Im H check
/// skips z = +-1, where every real-coefficient filter is real.
AssumptionReport check_assumptions(const LdgModel &model, int grid_points = 512,
                                   double tol = 1e-6);

struct GeneratorConfig {
    Index n = 32;
    Index n_hidden = 3;
    /// Target average total degree of the observed background graph.
    double avg_degree = 0.5;
    /// Cap on the number of observed neighbors of an observed node.
    Index max_observed_degree = 2;
    /// Allow background edges between two children of the same hidden node,
    /// and observed nodes fed by two children of the same hidden node.
    bool sibling_edges = false;
    /// Allow strict parents and strict spouses of hidden nodes. When off, every
    /// parent of a hidden node also feeds one of its children and no other
    /// observed node feeds a child, so each blanket is a clique in Im L.
    bool strict_blanket_nodes = false;
    /// Noise variances are uniform on [noise_min, noise_max].
    double noise_min = 1.0;
    double noise_max = 1.0;
    std::uint64_t seed = 1;
    /// Observed children per hidden node, inclusive range.
    Index min_children = 7;
    Index max_children = 8;
    /// Observed parents per hidden node, inclusive range.
    Index min_parents = 0;
    Index max_parents = 0;
    /// Assumptions 1..5 that must hold.
    std::vector<int> enforce = {1, 2, 3, 4, 5};
    int max_attempts = 2000;
    /// Node filters are z^{-1} + a z^{-2} + b z^{-3} with a, b uniform on
    /// [-filter_spread, filter_spread], redrawn until Im f stays away from zero
    /// on the open upper half circle.
    double filter_spread = 0.4;
    /// Bound on sum_i |c_ki| ||f_k||_1 for every node k.
    double gain_budget = 0.9;
};

/// Random admissible model: hidden nodes get disjoint observed blankets that
/// stay more than four hops apart, edge gains are uniform on [0.3, 1], every
/// node filter is a strictly causal three-tap FIR with a nonvanishing
/// imaginary part away from z = +-1, and rows are rescaled to keep the
/// recursion contractive.
LdgModel generate_random_network(const GeneratorConfig &config);

/// Time series x(t) = sum_{l>=1} H_l x(t - l) + e(t), one row per node.
Eigen::MatrixXd simulate(const LdgModel &model, Index samples, std::uint64_t seed,
                         Index burn_in = 2000);

/// Spectral radius of the companion form of the recursion.
double companion_spectral_radius(const LdgModel &model);

} // namespace skewnet
