#pragma once

#include <map>
#include <set>
#include <vector>

#include "skewnet/ldm.hpp"
#include "skewnet/skew.hpp"

namespace skewnet {

/// {(i, j) : |S_ij| > tau, i < j}.
std::set<UEdge> observable_edges(const SkewMatrixd &S_hat, double tau);

/// One connected piece (M, Q) of the support graph of the low-rank part.
struct HiddenComponent {
    std::vector<Index> M;
    std::set<UEdge> Q;
    std::map<Index, Index> degrees;
    Index alpha = 0;
    /// No node falls short of the maximum degree.
    bool attach_all = false;
    /// Nodes of maximum degree.
    std::vector<Index> d_h;
    /// Nodes below the maximum degree.
    std::vector<Index> M_tilde;
};

/// Connected components of {(i, j) : |L_ij| > tau}, ordered by smallest node.
std::vector<HiddenComponent> hidden_components(const SkewMatrixd &L_hat, double tau);

/// Observed neighbors of the hidden node placed in one component: all of M when
/// attach_all, else the full-degree nodes plus every deficient node that has no
/// edge in E_R to any full-degree node.
std::vector<Index> attach_hidden(const HiddenComponent &comp, const std::set<UEdge> &E_R);

/// Nodes 0..n_observed-1 are observed (in the order of the decomposed matrix);
/// n_observed + l is the hidden node of component l.
struct ReconstructedTopology {
    Index n_observed = 0;
    Index n_hidden = 0;
    std::set<UEdge> edges;
    std::set<UEdge> observed_edges() const;
    std::set<Index> hidden_neighbors(Index l) const;
};

/// Observed topology from S_hat and one hidden node per component of L_hat.
/// Both inputs are divided by max|S_hat + L_hat| before thresholding at tau.
ReconstructedTopology full_topology(const SkewMatrixd &S_hat, const SkewMatrixd &L_hat,
                                    double tau = 1e-6);

/// Edge-wise majority over reconstructions of the same observed nodes, one
/// per frequency. The hidden count is the most common one (smaller on ties);
/// hidden nodes of the runs with that count are aligned to the first such run
/// by neighbor-set Jaccard before their edges are voted on.
ReconstructedTopology majority_topology(const std::vector<ReconstructedTopology> &runs);

struct DmPaths {
    bool de = false;
    bool ss = false;
};

/// Two-hop structures through hidden node h linking observed i and j, in
/// either orientation of the pair.
DmPaths dm_path_exists(const LdgModel &model, Index i, Index j, Index h);

struct EvaluationMetrics {
    double observed_precision = 1;
    double observed_recall = 1;
    Index true_hidden = 0;
    Index recovered_hidden = 0;
    Index hidden_count_delta = 0;
    /// matches[l] = index into model.hidden() for reconstructed hidden l, or -1.
    std::vector<Index> matches;
    std::vector<double> jaccard;
    double hidden_precision = 1;
    double hidden_recall = 1;
    bool exact_match = false;
    /// Hidden nodes of the model (by model index) with exactly one strict
    /// spouse. Their reconstruction may carry one false edge.
    std::vector<Index> single_spouse_hidden;
};

/// Scores a reconstruction against top(G) of the generating model (or kin(G)
/// restricted to observed nodes when kin_mode is set). Reconstructed hidden
/// nodes are matched greedily, one to one, by Jaccard similarity of neighbor
/// sets.
EvaluationMetrics evaluate(const ReconstructedTopology &recon, const LdgModel &truth,
                           bool kin_mode = false);

} // namespace skewnet
