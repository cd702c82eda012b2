#include "skewnet/topology.hpp"

#include <algorithm>
#include <cmath>

#include "disjoint_sets.hpp"
#include "skewnet/errors.hpp"

namespace skewnet {

std::set<UEdge> observable_edges(const SkewMatrixd &S_hat, double tau) {
    if (!(tau > 0))
        throw ParameterError("observable_edges: tau must be positive");
    std::set<UEdge> out;
    for (Index i = 0; i < S_hat.n(); ++i)
        for (Index j = i + 1; j < S_hat.n(); ++j)
            if (std::abs(S_hat(i, j)) > tau)
                out.insert({i, j});
    return out;
}

std::vector<HiddenComponent> hidden_components(const SkewMatrixd &L_hat, double tau) {
    if (!(tau > 0))
        throw ParameterError("hidden_components: tau must be positive");
    const Index n = L_hat.n();
    const auto edges = observable_edges(L_hat, tau);
    detail::DisjointSets sets(n);
    std::vector<char> touched(n, 0);
    for (const auto &[i, j] : edges) {
        sets.unite(i, j);
        touched[i] = touched[j] = 1;
    }
    std::map<Index, HiddenComponent> by_root;
    for (Index v = 0; v < n; ++v)
        if (touched[v]) {
            auto &c = by_root[sets.find(v)];
            c.M.push_back(v);
            c.degrees[v] = 0;
        }
    for (const auto &e : edges) {
        auto &c = by_root[sets.find(e.first)];
        c.Q.insert(e);
        ++c.degrees[e.first];
        ++c.degrees[e.second];
    }
    std::vector<HiddenComponent> out;
    for (auto &[root, c] : by_root) {
        for (const auto &[v, d] : c.degrees)
            c.alpha = std::max(c.alpha, d);
        for (const auto &[v, d] : c.degrees)
            (d == c.alpha ? c.d_h : c.M_tilde).push_back(v);
        c.attach_all = c.M_tilde.empty();
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<Index> attach_hidden(const HiddenComponent &comp, const std::set<UEdge> &E_R) {
    if (comp.M.empty())
        throw DomainError("attach_hidden: empty component");
    if (comp.attach_all)
        return comp.M;
    std::vector<Index> out = comp.d_h;
    for (Index k : comp.M_tilde) {
        const bool touches_full = std::any_of(comp.d_h.begin(), comp.d_h.end(),
                                              [&](Index d) { return E_R.count(uedge(k, d)) > 0; });
        if (!touches_full)
            out.push_back(k);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::set<UEdge> ReconstructedTopology::observed_edges() const {
    std::set<UEdge> out;
    for (const auto &e : edges)
        if (e.second < n_observed)
            out.insert(e);
    return out;
}

std::set<Index> ReconstructedTopology::hidden_neighbors(Index l) const {
    const Index h = n_observed + l;
    std::set<Index> out;
    for (const auto &[a, b] : edges) {
        if (b == h)
            out.insert(a);
        else if (a == h)
            out.insert(b);
    }
    return out;
}

ReconstructedTopology full_topology(const SkewMatrixd &S_hat, const SkewMatrixd &L_hat,
                                    double tau) {
    if (S_hat.n() != L_hat.n())
        throw DimensionError("full_topology: S_hat and L_hat differ in dimension");
    const double scale = max_abs((S_hat.matrix() + L_hat.matrix()).eval());
    const double s = scale > 0 ? 1.0 / scale : 1.0;
    ReconstructedTopology out;
    out.n_observed = S_hat.n();
    out.edges = observable_edges(s * S_hat, tau);
    const auto observed = out.edges;
    const auto comps = hidden_components(s * L_hat, tau);
    out.n_hidden = static_cast<Index>(comps.size());
    for (std::size_t l = 0; l < comps.size(); ++l) {
        const Index h = out.n_observed + static_cast<Index>(l);
        for (Index v : attach_hidden(comps[l], observed))
            out.edges.insert(uedge(v, h));
    }
    return out;
}

namespace {

double jaccard(const std::set<Index> &a, const std::set<Index> &b) {
    std::size_t inter = 0;
    for (Index v : a)
        inter += b.count(v);
    const std::size_t uni = a.size() + b.size() - inter;
    return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

/// Greedy one-to-one matching by Jaccard similarity; out[g] indexes `to` or is -1.
std::vector<Index> match_by_jaccard(const std::vector<std::set<Index>> &from,
                                    const std::vector<std::set<Index>> &to,
                                    std::vector<double> *scores = nullptr) {
    std::vector<Index> out(from.size(), -1);
    if (scores)
        scores->assign(from.size(), 0.0);
    std::vector<char> used(to.size(), 0), done(from.size(), 0);
    for (std::size_t round = 0; round < std::min(from.size(), to.size()); ++round) {
        double best = -1.0;
        std::size_t bg = 0, bt = 0;
        for (std::size_t g = 0; g < from.size(); ++g) {
            if (done[g])
                continue;
            for (std::size_t t = 0; t < to.size(); ++t)
                if (!used[t]) {
                    const double s = jaccard(from[g], to[t]);
                    if (s > best) {
                        best = s;
                        bg = g;
                        bt = t;
                    }
                }
        }
        done[bg] = used[bt] = 1;
        out[bg] = static_cast<Index>(bt);
        if (scores)
            (*scores)[bg] = best;
    }
    return out;
}

std::vector<std::set<Index>> all_hidden_neighbors(const ReconstructedTopology &t) {
    std::vector<std::set<Index>> out;
    for (Index l = 0; l < t.n_hidden; ++l)
        out.push_back(t.hidden_neighbors(l));
    return out;
}

} // namespace

ReconstructedTopology majority_topology(const std::vector<ReconstructedTopology> &runs) {
    if (runs.empty())
        throw DomainError("majority_topology: no reconstructions given");
    const Index n_obs = runs.front().n_observed;
    std::map<Index, int> count_votes;
    for (const auto &r : runs) {
        if (r.n_observed != n_obs)
            throw DimensionError("majority_topology: reconstructions differ in observed node count");
        ++count_votes[r.n_hidden];
    }
    Index n_hidden = 0;
    int best_votes = 0;
    for (const auto &[count, votes] : count_votes)
        if (votes > best_votes) {
            n_hidden = count;
            best_votes = votes;
        }

    ReconstructedTopology out;
    out.n_observed = n_obs;
    out.n_hidden = n_hidden;
    std::map<UEdge, int> observed_votes;
    for (const auto &r : runs)
        for (const auto &e : r.observed_edges())
            ++observed_votes[e];
    for (const auto &[e, votes] : observed_votes)
        if (2 * votes > static_cast<int>(runs.size()))
            out.edges.insert(e);

    const ReconstructedTopology *reference = nullptr;
    std::map<UEdge, int> hidden_votes;
    for (const auto &r : runs) {
        if (r.n_hidden != n_hidden)
            continue;
        if (!reference)
            reference = &r;
        const auto match = match_by_jaccard(all_hidden_neighbors(r), all_hidden_neighbors(*reference));
        for (Index l = 0; l < n_hidden; ++l)
            for (Index v : r.hidden_neighbors(l))
                ++hidden_votes[uedge(v, n_obs + match[l])];
    }
    for (const auto &[e, votes] : hidden_votes)
        if (2 * votes > best_votes)
            out.edges.insert(e);
    return out;
}

DmPaths dm_path_exists(const LdgModel &model, Index i, Index j, Index h) {
    if (i == j || model.is_hidden(i) || model.is_hidden(j) || !model.is_hidden(h))
        throw DomainError("dm_path_exists: need distinct observed i, j and hidden h");
    const auto views = derive_views(model);
    auto e = [&](Index a, Index b) { return views.children[a].count(b) > 0; };
    const auto &obs = model.observed();

    DmPaths out;
    for (const auto &[a, b] : {std::pair{i, j}, std::pair{j, i}}) {
        if ((e(h, a) && e(h, b)) || (e(h, a) && e(b, h)) || (e(a, h) && e(h, b)) ||
            (e(h, a) && e(b, a)) || (e(h, b) && e(a, b)))
            out.de = true;
        for (Index k : obs) {
            if (k == a || k == b)
                continue;
            if ((e(h, a) && e(h, k) && e(b, k)) || (e(a, h) && e(h, k) && e(b, k)) ||
                (e(a, k) && e(h, k) && e(b, h)) || (e(a, k) && e(h, k) && e(h, b)))
                out.de = true;
        }
        if (e(a, h) && e(b, h))
            out.ss = true;
        for (Index k1 : obs) {
            if (k1 == a || k1 == b || !e(a, k1) || !e(h, k1))
                continue;
            for (Index k2 : obs)
                if (k2 != a && k2 != b && e(h, k2) && e(k2, b))
                    out.ss = true;
        }
    }
    return out;
}

EvaluationMetrics evaluate(const ReconstructedTopology &recon, const LdgModel &truth,
                           bool kin_mode) {
    if (recon.n_observed != truth.n_observed())
        throw DimensionError("evaluate: reconstruction has " + std::to_string(recon.n_observed) +
                             " observed nodes, model has " +
                             std::to_string(truth.n_observed()));
    EvaluationMetrics m;
    const auto full = derive_views(truth);
    const auto obs_views = observed_views(truth);
    const std::set<UEdge> &true_obs = kin_mode ? obs_views.kin : obs_views.top;
    const auto got_obs = recon.observed_edges();

    auto ratio = [](std::size_t num, std::size_t den) {
        return den == 0 ? 1.0 : static_cast<double>(num) / static_cast<double>(den);
    };
    std::size_t tp = 0;
    for (const auto &e : got_obs)
        tp += true_obs.count(e);
    m.observed_precision = ratio(tp, got_obs.size());
    m.observed_recall = ratio(tp, true_obs.size());

    std::vector<Index> pos(truth.n(), -1);
    for (Index k = 0; k < truth.n_observed(); ++k)
        pos[truth.observed()[k]] = k;
    bool hidden_hidden = false;
    std::vector<std::set<Index>> true_nb;
    for (Index h : truth.hidden()) {
        std::set<Index> nb;
        for (Index v : full.parents[h])
            (pos[v] >= 0 ? (void)nb.insert(pos[v]) : (void)(hidden_hidden = true));
        for (Index v : full.children[h])
            (pos[v] >= 0 ? (void)nb.insert(pos[v]) : (void)(hidden_hidden = true));
        true_nb.push_back(std::move(nb));
    }
    std::vector<std::set<Index>> got_nb;
    for (Index l = 0; l < recon.n_hidden; ++l)
        got_nb.push_back(recon.hidden_neighbors(l));

    m.true_hidden = truth.n_hidden();
    m.recovered_hidden = recon.n_hidden;
    m.hidden_count_delta = recon.n_hidden - truth.n_hidden();

    m.matches = match_by_jaccard(got_nb, true_nb, &m.jaccard);

    std::size_t htp = 0, hgot = 0, htrue = 0;
    bool blankets_equal = true;
    for (std::size_t g = 0; g < got_nb.size(); ++g) {
        hgot += got_nb[g].size();
        if (m.matches[g] < 0) {
            blankets_equal = false;
            continue;
        }
        const auto &t = true_nb[m.matches[g]];
        for (Index v : got_nb[g])
            htp += t.count(v);
        if (got_nb[g] != t)
            blankets_equal = false;
    }
    for (const auto &t : true_nb)
        htrue += t.size();
    m.hidden_precision = ratio(htp, hgot);
    m.hidden_recall = ratio(htp, htrue);
    for (Index h : truth.hidden())
        if (full.strict_spouses(h).size() == 1)
            m.single_spouse_hidden.push_back(h);
    m.exact_match = got_obs == true_obs && m.hidden_count_delta == 0 && blankets_equal &&
                    !hidden_hidden;
    return m;
}

} // namespace skewnet
