#include "skewnet/ldm.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "skewnet/errors.hpp"

namespace skewnet {

namespace {

void check_unit(Complex z, const char *who) {
    if (std::abs(std::abs(z) - 1.0) > 1e-12)
        throw DomainError(std::string(who) + ": z must lie on the unit circle (|z| = " +
                          std::to_string(std::abs(z)) + ")");
}

std::string z_label(Complex z) {
    std::ostringstream os;
    os.precision(6);
    os << "z = e^{j " << std::arg(z) << "}";
    return os.str();
}

/// Inverse of a square complex matrix, rejecting near-singular input.
Eigen::MatrixXcd checked_inverse(const Eigen::MatrixXcd &m, const std::string &what) {
    if (m.rows() == 0)
        return m;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-13))
        throw ConditioningError(what + " is numerically singular", rcond > 0 ? 1.0 / rcond : INFINITY);
    return lu.inverse();
}

Eigen::MatrixXcd hermitian_part(const Eigen::MatrixXcd &m) {
    return 0.5 * (m + m.adjoint());
}

Eigen::MatrixXcd block(const Eigen::MatrixXcd &m, const std::vector<Index> &rows,
                       const std::vector<Index> &cols) {
    Eigen::MatrixXcd out(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j)
            out(i, j) = m(rows[i], cols[j]);
    return out;
}

std::vector<std::vector<int>> hop_distances(Index n, const std::set<UEdge> &edges) {
    std::vector<std::vector<Index>> adj(n);
    for (const auto &[a, b] : edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    std::vector<std::vector<int>> dist(n, std::vector<int>(n, -1));
    for (Index s = 0; s < n; ++s) {
        std::deque<Index> queue{s};
        dist[s][s] = 0;
        while (!queue.empty()) {
            const Index u = queue.front();
            queue.pop_front();
            for (Index v : adj[u])
                if (dist[s][v] < 0) {
                    dist[s][v] = dist[s][u] + 1;
                    queue.push_back(v);
                }
        }
    }
    return dist;
}

/// Im f(e^{jw}) = -sin(w) (a1 + 2 a2 cos w + a3 (4 cos^2 w - 1)) for taps
/// (0, a1, a2, a3); the bracket is a quadratic in cos w, and its minimum over
/// [-1, 1] bounds how close Im f comes to vanishing inside (0, pi).
double sine_margin(double a1, double a2, double a3) {
    auto q = [&](double x) { return a1 + 2 * a2 * x + a3 * (4 * x * x - 1); };
    double lo = std::min(q(-1.0), q(1.0));
    if (a3 > 0) {
        const double vertex = -a2 / (4 * a3);
        if (std::abs(vertex) < 1)
            lo = std::min(lo, q(vertex));
    }
    return lo;
}

/// Strictly causal three-tap filter whose imaginary part keeps one sign on
/// the open upper half circle, with lag-2 and lag-3 taps up to `spread`
/// relative to the lag-1 tap.
std::vector<double> draw_filter(std::mt19937_64 &rng, double spread) {
    std::uniform_real_distribution<double> tap(-spread, spread);
    for (;;) {
        const double a2 = tap(rng), a3 = tap(rng);
        if (sine_margin(1.0, a2, a3) >= 0.2 * (1.0 + std::abs(a2) + std::abs(a3)))
            return {0.0, 1.0, a2, a3};
    }
}

} // namespace

Complex eval_fir(const std::vector<double> &taps, Complex z) {
    Complex acc = 0.0, zinv_pow = 1.0;
    const Complex zinv = 1.0 / z;
    for (double c : taps) {
        acc += c * zinv_pow;
        zinv_pow *= zinv;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// LdgModel

LdgModel::LdgModel(Index n, std::vector<EdgeFilter> edges,
                   std::vector<std::vector<double>> node_filters, std::vector<NoiseSpec> noise,
                   std::vector<Index> hidden)
    : n_(n), edges_(std::move(edges)), node_filters_(std::move(node_filters)),
      noise_(std::move(noise)), hidden_(std::move(hidden)),
      hidden_mask_(static_cast<std::size_t>(n), 0) {
    if (n < 1)
        throw DimensionError("LdgModel: need at least one node");
    if (static_cast<Index>(node_filters_.size()) != n || static_cast<Index>(noise_.size()) != n)
        throw DimensionError("LdgModel: one node filter and one noise spec per node required");
    std::set<std::pair<Index, Index>> seen;
    for (const auto &e : edges_) {
        if (e.from < 0 || e.to < 0 || e.from >= n || e.to >= n)
            throw DimensionError("LdgModel: edge endpoint out of range");
        if (e.from == e.to)
            throw DomainError("LdgModel: self-loop at node " + std::to_string(e.from));
        if (!(e.gain != 0.0) || !std::isfinite(e.gain))
            throw ParameterError("LdgModel: edge gains must be finite and nonzero");
        if (!seen.insert({e.from, e.to}).second)
            throw DomainError("LdgModel: duplicate edge " + std::to_string(e.from) + "->" +
                              std::to_string(e.to));
    }
    std::sort(edges_.begin(), edges_.end(), [](const EdgeFilter &a, const EdgeFilter &b) {
        return std::tie(a.to, a.from) < std::tie(b.to, b.from);
    });
    for (const auto &ns : noise_)
        if (!ns.shaped() && !(ns.variance > 0))
            throw ParameterError("LdgModel: noise variances must be positive");
    std::sort(hidden_.begin(), hidden_.end());
    hidden_.erase(std::unique(hidden_.begin(), hidden_.end()), hidden_.end());
    for (Index h : hidden_) {
        if (h < 0 || h >= n)
            throw DimensionError("LdgModel: hidden node out of range");
        hidden_mask_[h] = 1;
    }
    for (Index k = 0; k < n; ++k)
        if (!hidden_mask_[k])
            observed_.push_back(k);
}

Complex LdgModel::edge_response(const EdgeFilter &e, Complex z) const {
    return e.gain * eval_fir(e.taps.empty() ? node_filters_[e.to] : e.taps, z);
}

double LdgModel::noise_psd(Index k, Complex z) const {
    const auto &ns = noise_[k];
    return ns.shaped() ? std::norm(eval_fir(ns.taps, z)) : ns.variance;
}

Eigen::MatrixXd LdgModel::lag_matrix(Index l) const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n_, n_);
    for (const auto &e : edges_) {
        const auto &taps = e.taps.empty() ? node_filters_[e.to] : e.taps;
        if (l < static_cast<Index>(taps.size()))
            m(e.to, e.from) += e.gain * taps[l];
    }
    return m;
}

Index LdgModel::max_lag() const {
    Index lag = 0;
    for (const auto &e : edges_) {
        const auto &taps = e.taps.empty() ? node_filters_[e.to] : e.taps;
        lag = std::max<Index>(lag, static_cast<Index>(taps.size()) - 1);
    }
    return lag;
}

bool LdgModel::shared_phase_form() const {
    return std::all_of(edges_.begin(), edges_.end(),
                       [](const EdgeFilter &e) { return e.taps.empty() && e.gain > 0; });
}

// ---------------------------------------------------------------------------
// Spectral quantities

Eigen::MatrixXcd eval_H(const LdgModel &model, Complex z) {
    check_unit(z, "eval_H");
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(model.n(), model.n());
    for (const auto &e : model.edges())
        h(e.to, e.from) = model.edge_response(e, z);
    return h;
}

Eigen::VectorXd noise_spectrum(const LdgModel &model, Complex z) {
    Eigen::VectorXd d(model.n());
    for (Index k = 0; k < model.n(); ++k)
        d(k) = model.noise_psd(k, z);
    return d;
}

Eigen::MatrixXcd psdm_exact(const LdgModel &model, Complex z) {
    const Index n = model.n();
    const Eigen::MatrixXcd ih = Eigen::MatrixXcd::Identity(n, n) - eval_H(model, z);
    const Eigen::MatrixXcd g = checked_inverse(ih, "I - H(" + z_label(z) + ")");
    const Eigen::VectorXcd phi = noise_spectrum(model, z).cast<Complex>();
    return hermitian_part(g * phi.asDiagonal() * g.adjoint());
}

Eigen::MatrixXcd ipsdm_exact(const LdgModel &model, Complex z) {
    const Index n = model.n();
    const Eigen::MatrixXcd ih = Eigen::MatrixXcd::Identity(n, n) - eval_H(model, z);
    const Eigen::VectorXd phi = noise_spectrum(model, z);
    if (!(phi.minCoeff() > 0))
        throw ConditioningError("noise spectrum vanishes at " + z_label(z), INFINITY);
    const Eigen::VectorXcd inv = phi.cwiseInverse().cast<Complex>();
    return hermitian_part(ih.adjoint() * inv.asDiagonal() * ih);
}

Eigen::MatrixXcd ipsdm_observed(const LdgModel &model, Complex z) {
    const Eigen::MatrixXcd k = ipsdm_exact(model, z);
    const auto &o = model.observed();
    const auto &h = model.hidden();
    const Eigen::MatrixXcd koo = block(k, o, o);
    if (h.empty())
        return koo;
    const Eigen::MatrixXcd khh_inv = checked_inverse(block(k, h, h), "K_hh at " + z_label(z));
    return hermitian_part(koo - block(k, o, h) * khh_inv * block(k, h, o));
}

GroundTruthDecomposition sl_ground_truth(const LdgModel &model, Complex z) {
    const Eigen::MatrixXcd H = eval_H(model, z);
    const Eigen::VectorXd phi = noise_spectrum(model, z);
    const auto &o = model.observed();
    const auto &h = model.hidden();
    const Index no = model.n_observed(), nh = model.n_hidden();

    Eigen::VectorXcd inv_o(no), inv_h(nh);
    for (Index i = 0; i < no; ++i)
        inv_o(i) = 1.0 / phi(o[i]);
    for (Index i = 0; i < nh; ++i)
        inv_h(i) = 1.0 / phi(h[i]);

    const Eigen::MatrixXcd Hoo = block(H, o, o), Hoh = block(H, o, h), Hho = block(H, h, o),
                           Hhh = block(H, h, h);
    const Eigen::MatrixXcd Io = Eigen::MatrixXcd::Identity(no, no);
    const Eigen::MatrixXcd Ih = Eigen::MatrixXcd::Identity(nh, nh);

    GroundTruthDecomposition gt;
    gt.z = z;
    gt.S = hermitian_part((Io - Hoo).adjoint() * inv_o.asDiagonal() * (Io - Hoo));
    if (nh == 0) {
        gt.L = Eigen::MatrixXcd::Zero(no, no);
        gt.Psi = Eigen::MatrixXcd::Zero(0, no);
        gt.Lambda = Eigen::MatrixXcd::Zero(0, 0);
        return gt;
    }
    gt.Psi = Hoh.adjoint() * inv_o.asDiagonal() * (Io - Hoo) +
             (Ih - Hhh).adjoint() * inv_h.asDiagonal() * Hho;
    gt.Lambda = hermitian_part(Hoh.adjoint() * inv_o.asDiagonal() * Hoh +
                               (Ih - Hhh).adjoint() * inv_h.asDiagonal() * (Ih - Hhh));
    const Eigen::MatrixXcd lambda_inv = checked_inverse(gt.Lambda, "Lambda at " + z_label(z));
    gt.L = hermitian_part(Hho.adjoint() * inv_h.asDiagonal() * Hho -
                          gt.Psi.adjoint() * lambda_inv * gt.Psi);
    return gt;
}

// ---------------------------------------------------------------------------
// Graph views

std::set<Index> GraphViews::strict_parents(Index k) const {
    std::set<Index> out;
    for (Index p : parents[k])
        if (!children[k].count(p) && !spouses[k].count(p))
            out.insert(p);
    return out;
}

std::set<Index> GraphViews::strict_spouses(Index k) const {
    std::set<Index> out;
    for (Index s : spouses[k])
        if (!children[k].count(s) && !parents[k].count(s))
            out.insert(s);
    return out;
}

std::set<Index> GraphViews::blanket(Index k) const {
    std::set<Index> out = parents[k];
    out.insert(children[k].begin(), children[k].end());
    out.insert(spouses[k].begin(), spouses[k].end());
    return out;
}

GraphViews derive_views(Index n, const std::vector<std::pair<Index, Index>> &directed) {
    GraphViews v;
    v.n = n;
    v.parents.assign(n, {});
    v.children.assign(n, {});
    v.spouses.assign(n, {});
    for (const auto &[from, to] : directed) {
        if (from == to)
            continue;
        v.children[from].insert(to);
        v.parents[to].insert(from);
        v.top.insert(uedge(from, to));
    }
    for (Index c = 0; c < n; ++c)
        for (Index a : v.parents[c])
            for (Index b : v.parents[c])
                if (a != b)
                    v.spouses[a].insert(b);
    v.kin = v.top;
    for (Index a = 0; a < n; ++a)
        for (Index b : v.spouses[a]) {
            v.kin.insert(uedge(a, b));
            if (!v.children[a].count(b) && !v.parents[a].count(b))
                v.strict_spouse_edges.insert(uedge(a, b));
        }
    v.hop = hop_distances(n, v.top);
    return v;
}

GraphViews derive_views(const LdgModel &model) {
    std::vector<std::pair<Index, Index>> directed;
    for (const auto &e : model.edges())
        directed.emplace_back(e.from, e.to);
    return derive_views(model.n(), directed);
}

GraphViews observed_views(const LdgModel &model) {
    std::vector<Index> pos(model.n(), -1);
    for (Index i = 0; i < model.n_observed(); ++i)
        pos[model.observed()[i]] = i;
    std::vector<std::pair<Index, Index>> directed;
    for (const auto &e : model.edges())
        if (pos[e.from] >= 0 && pos[e.to] >= 0)
            directed.emplace_back(pos[e.from], pos[e.to]);
    return derive_views(model.n_observed(), directed);
}

std::vector<Complex> unit_grid(int points) {
    if (points < 1)
        throw ParameterError("unit_grid: need at least one point");
    std::vector<Complex> grid;
    for (int m = 0; m < points; ++m)
        grid.push_back(std::polar(1.0, 2.0 * M_PI * m / points));
    return grid;
}

// ---------------------------------------------------------------------------
// Assumptions

bool AssumptionReport::all_hold() const {
    return well_posed.holds && detectable.holds &&
           std::all_of(assumptions.begin(), assumptions.end(),
                       [](const AssumptionCheck &c) { return c.holds; });
}

AssumptionReport check_assumptions(const LdgModel &model, int grid_points, double tol) {
    const Index n = model.n();
    const auto views = derive_views(model);
    const auto grid = unit_grid(grid_points);
    AssumptionReport rep;
    rep.well_posed.name = "well-posed";
    rep.detectable.name = "topologically detectable";
    rep.assumptions.resize(5);
    rep.assumptions[0].name = "Assumption 1 (observed child and another observed neighbor)";
    rep.assumptions[1].name = "Assumption 2 (hidden nodes more than four hops apart)";
    rep.assumptions[2].name = "Assumption 3 (nonzero imaginary part of every edge)";
    rep.assumptions[3].name = "Assumption 4 (equal phases of edges into a node)";
    rep.assumptions[4].name = "Assumption 5 (zero or at least two strict spouses)";
    auto fail = [](AssumptionCheck &c, std::string witness) {
        c.holds = false;
        if (c.witnesses.size() < 20)
            c.witnesses.push_back(std::move(witness));
    };

    double min_det = INFINITY, min_psd = INFINITY;
    Complex det_at = 1.0, psd_at = 1.0;
    for (const Complex z : grid) {
        const Eigen::MatrixXcd ih = Eigen::MatrixXcd::Identity(n, n) - eval_H(model, z);
        const double d = std::abs(ih.determinant());
        if (d < min_det) {
            min_det = d;
            det_at = z;
        }
        const double p = noise_spectrum(model, z).minCoeff();
        if (p < min_psd) {
            min_psd = p;
            psd_at = z;
        }
    }
    if (!(min_det > tol))
        fail(rep.well_posed, "|det(I - H)| = " + std::to_string(min_det) + " at " + z_label(det_at));
    if (!(min_psd > tol))
        fail(rep.detectable, "noise spectrum " + std::to_string(min_psd) + " at " + z_label(psd_at));

    for (Index h : model.hidden()) {
        Index observed_children = 0;
        std::set<Index> observed_neighbors;
        for (Index c : views.children[h])
            if (!model.is_hidden(c)) {
                ++observed_children;
                observed_neighbors.insert(c);
            }
        for (Index p : views.parents[h])
            if (!model.is_hidden(p))
                observed_neighbors.insert(p);
        if (observed_children == 0 || observed_neighbors.size() < 2)
            fail(rep.assumptions[0], "node " + std::to_string(h));
    }

    const auto &hid = model.hidden();
    for (std::size_t a = 0; a < hid.size(); ++a)
        for (std::size_t b = a + 1; b < hid.size(); ++b) {
            const int d = views.hop[hid[a]][hid[b]];
            if (d >= 0 && d <= 4)
                fail(rep.assumptions[1], "nodes " + std::to_string(hid[a]) + ", " +
                                             std::to_string(hid[b]) + " at d_hop " +
                                             std::to_string(d));
        }

    for (const auto &e : model.edges()) {
        for (int m = 0; m < grid_points; ++m) {
            if (2 * m == grid_points || m == 0)
                continue;
            const Complex hz = model.edge_response(e, grid[m]);
            if (!(std::abs(hz.imag()) > 1e-9 * std::max(1.0, std::abs(hz)))) {
                fail(rep.assumptions[2], "edge " + std::to_string(e.from) + "->" +
                                             std::to_string(e.to) + " at " + z_label(grid[m]));
                break;
            }
        }
    }

    std::map<Index, std::vector<const EdgeFilter *>> incoming;
    for (const auto &e : model.edges())
        incoming[e.to].push_back(&e);
    for (const auto &[k, in] : incoming) {
        bool ok = true;
        for (std::size_t a = 1; a < in.size() && ok; ++a)
            for (const Complex z : grid) {
                const Complex h0 = model.edge_response(*in[0], z);
                const Complex ha = model.edge_response(*in[a], z);
                if (std::abs(h0) < 1e-12 || std::abs(ha) < 1e-12)
                    continue;
                // Equal phases: the ratio is real and positive.
                const Complex ratio = ha / h0;
                if (std::abs(ratio.imag()) > 1e-9 * std::abs(ratio) || ratio.real() <= 0) {
                    fail(rep.assumptions[3], "node " + std::to_string(k) + " at " + z_label(z));
                    ok = false;
                    break;
                }
            }
    }

    for (Index h : model.hidden())
        if (views.strict_spouses(h).size() == 1)
            fail(rep.assumptions[4], "node " + std::to_string(h));
    return rep;
}

// ---------------------------------------------------------------------------
// Generator

LdgModel generate_random_network(const GeneratorConfig &cfg) {
    const Index n = cfg.n, nh = cfg.n_hidden, no = n - nh;
    if (n < 2 || nh < 0 || nh >= n)
        throw ParameterError("generate_random_network: need 0 <= n_hidden < n and n >= 2");
    if (cfg.min_children < 1 || cfg.max_children < cfg.min_children || cfg.min_parents < 0 ||
        cfg.max_parents < cfg.min_parents)
        throw ParameterError("generate_random_network: invalid child/parent ranges");
    if (!(cfg.avg_degree >= 0) || !(cfg.gain_budget > 0 && cfg.gain_budget < 1))
        throw ParameterError("generate_random_network: invalid degree or gain budget");
    const Index per_hidden = std::max<Index>(2, cfg.min_children + cfg.min_parents);
    if (nh > 0 && nh * (per_hidden + 1) > n)
        throw GenerationError(
            "Assumption 2 (hidden nodes more than four hops apart) cannot be met with " +
            std::to_string(nh) + " hidden nodes among " + std::to_string(n) +
            " nodes; use fewer hidden nodes or more nodes");
    auto enforced = [&](int a) {
        return std::find(cfg.enforce.begin(), cfg.enforce.end(), a) != cfg.enforce.end();
    };

    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto uniform_int = [&](Index lo, Index hi) {
        return std::uniform_int_distribution<Index>(lo, hi)(rng);
    };

    std::string last_failure = "no attempt made";
    for (int attempt = 0; attempt < cfg.max_attempts; ++attempt) {
        std::vector<Index> hidden;
        for (Index h = no; h < n; ++h)
            hidden.push_back(h);
        std::vector<Index> pool(no);
        std::iota(pool.begin(), pool.end(), 0);
        std::shuffle(pool.begin(), pool.end(), rng);

        std::set<std::pair<Index, Index>> directed;
        std::size_t next = 0;
        bool short_pool = false;
        for (Index h : hidden) {
            const Index nc = uniform_int(cfg.min_children, cfg.max_children);
            const Index np = uniform_int(cfg.min_parents, cfg.max_parents);
            if (next + nc + np > pool.size()) {
                short_pool = true;
                break;
            }
            const std::size_t first_child = next;
            for (Index k = 0; k < nc; ++k)
                directed.insert({h, pool[next++]});
            for (Index k = 0; k < np; ++k) {
                const Index p = pool[next++];
                directed.insert({p, h});
                if (!cfg.strict_blanket_nodes)
                    directed.insert({p, pool[first_child + uniform_int(0, nc - 1)]});
            }
        }
        if (short_pool) {
            last_failure = "not enough observed nodes for the requested blankets";
            continue;
        }

        auto undirected_edges = [&]() {
            std::set<UEdge> u;
            for (const auto &[a, b] : directed)
                u.insert(uedge(a, b));
            return u;
        };
        auto hidden_far_apart = [&]() {
            if (hidden.size() < 2)
                return true;
            const auto dist = hop_distances(n, undirected_edges());
            for (std::size_t a = 0; a < hidden.size(); ++a)
                for (std::size_t b = a + 1; b < hidden.size(); ++b) {
                    const int d = dist[hidden[a]][hidden[b]];
                    if (d >= 0 && d <= 4)
                        return false;
                }
            return true;
        };

        const auto target = static_cast<std::size_t>(std::lround(cfg.avg_degree * no / 2.0));
        std::size_t added = 0;
        std::vector<Index> observed_degree(no, 0);
        std::vector<Index> sibling_of(no, -1);
        std::vector<std::set<Index>> fed_by(no);
        for (const auto &[a, b] : directed)
            if (a >= no)
                sibling_of[b] = a;
        for (std::size_t tries = 0; added < target && tries < 60 * (target + 1); ++tries) {
            const Index a = uniform_int(0, no - 1), b = uniform_int(0, no - 1);
            if (a == b || directed.count({a, b}) || directed.count({b, a}))
                continue;
            if (!cfg.sibling_edges && sibling_of[a] >= 0 &&
                (sibling_of[a] == sibling_of[b] || fed_by[b].count(sibling_of[a])))
                continue;
            if (!cfg.strict_blanket_nodes && sibling_of[b] >= 0 && sibling_of[a] != sibling_of[b])
                continue;
            if (observed_degree[a] >= cfg.max_observed_degree ||
                observed_degree[b] >= cfg.max_observed_degree)
                continue;
            directed.insert({a, b});
            if (enforced(2) && !hidden_far_apart()) {
                directed.erase({a, b});
                continue;
            }
            ++observed_degree[a];
            ++observed_degree[b];
            if (sibling_of[a] >= 0)
                fed_by[b].insert(sibling_of[a]);
            ++added;
        }

        std::vector<std::pair<Index, Index>> edge_list(directed.begin(), directed.end());
        const auto views = derive_views(n, edge_list);
        // A strict parent of a hidden node must not be adjacent to its
        // full-degree blanket nodes, or the attachment rule cannot tell it
        // apart from a strict spouse.
        bool separable = true;
        for (Index h : hidden) {
            const auto strict = views.strict_parents(h);
            if (strict.size() < 2)
                continue;
            std::set<Index> full = views.children[h];
            for (Index p : views.parents[h])
                if (views.spouses[h].count(p))
                    full.insert(p);
            for (Index p : strict)
                for (Index d : full)
                    if (views.top.count(uedge(p, d)))
                        separable = false;
        }
        if (!separable) {
            last_failure = "strict parent adjacent to a full-degree blanket node";
            continue;
        }

        std::vector<std::vector<double>> filters(n);
        std::vector<EdgeFilter> edges;
        for (const auto &[a, b] : edge_list)
            edges.push_back({a, b, 0.3 + 0.7 * unit(rng), {}});
        for (Index k = 0; k < n; ++k)
            filters[k] = draw_filter(rng, cfg.filter_spread);
        for (Index k = 0; k < n; ++k) {
            double row = 0.0;
            for (const auto &e : edges)
                if (e.to == k)
                    row += std::abs(e.gain);
            double l1 = 0.0;
            for (double c : filters[k])
                l1 += std::abs(c);
            if (row * l1 > cfg.gain_budget) {
                const double s = cfg.gain_budget / (row * l1);
                for (double &c : filters[k])
                    c *= s;
            }
        }
        std::vector<NoiseSpec> noise(n);
        for (auto &ns : noise)
            ns.variance = cfg.noise_min + (cfg.noise_max - cfg.noise_min) * unit(rng);

        LdgModel model(n, std::move(edges), std::move(filters), std::move(noise), hidden);
        const auto rep = check_assumptions(model);
        bool ok = rep.well_posed.holds && rep.detectable.holds;
        for (int a = 1; a <= 5 && ok; ++a)
            if (enforced(a) && !rep.assumptions[a - 1].holds) {
                ok = false;
                last_failure = rep.assumptions[a - 1].name;
            }
        if (ok)
            return model;
    }
    throw GenerationError("generate_random_network: rejection budget exhausted (last failure: " +
                          last_failure + "); try fewer hidden nodes or a smaller degree");
}

// ---------------------------------------------------------------------------
// Simulation

double companion_spectral_radius(const LdgModel &model) {
    const Index n = model.n(), p = model.max_lag();
    if (p == 0)
        return 0.0;
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n * p, n * p);
    for (Index l = 1; l <= p; ++l)
        comp.block(0, (l - 1) * n, n, n) = model.lag_matrix(l);
    if (p > 1)
        comp.block(n, 0, n * (p - 1), n * (p - 1)).setIdentity();
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

Eigen::MatrixXd simulate(const LdgModel &model, Index samples, std::uint64_t seed, Index burn_in) {
    if (samples < 1 || burn_in < 0)
        throw ParameterError("simulate: sample count must be positive");
    const Index n = model.n(), p = model.max_lag();
    if (model.lag_matrix(0).cwiseAbs().maxCoeff() > 0)
        throw SimulationError("simulate: instantaneous (lag-0) couplings are not simulated");
    const double radius = companion_spectral_radius(model);
    if (!(radius < 1.0))
        throw SimulationError("simulate: recursion is unstable (companion spectral radius " +
                              std::to_string(radius) + ")");

    std::vector<Eigen::MatrixXd> lags;
    for (Index l = 1; l <= p; ++l)
        lags.push_back(model.lag_matrix(l));
    Index q = 0;
    for (Index k = 0; k < n; ++k)
        q = std::max<Index>(q, static_cast<Index>(model.noise(k).taps.size()));

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const Index total = burn_in + samples;
    const Index hist = std::max<Index>(std::max<Index>(p, q), 1);
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, total + hist);
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, total + hist);
    Eigen::VectorXd sd(n);
    for (Index k = 0; k < n; ++k)
        sd(k) = model.noise(k).shaped() ? 1.0 : std::sqrt(model.noise(k).variance);

    for (Index t = hist; t < total + hist; ++t) {
        for (Index k = 0; k < n; ++k)
            w(k, t) = normal(rng);
        Eigen::VectorXd xt = Eigen::VectorXd::Zero(n);
        for (Index l = 1; l <= p; ++l)
            xt.noalias() += lags[l - 1] * x.col(t - l);
        for (Index k = 0; k < n; ++k) {
            const auto &ns = model.noise(k);
            if (!ns.shaped()) {
                xt(k) += sd(k) * w(k, t);
            } else {
                for (std::size_t m = 0; m < ns.taps.size(); ++m)
                    xt(k) += ns.taps[m] * w(k, t - static_cast<Index>(m));
            }
        }
        x.col(t) = xt;
    }
    return x.rightCols(samples);
}

} // namespace skewnet
