#include <doctest.h>

#include "oracles.hpp"
#include "skewnet/errors.hpp"
#include "skewnet/topology.hpp"

using namespace skewnet;

namespace {

const Complex kZ = std::polar(1.0, 3.0 * M_PI / 8.0);

SkewMatrixd skew_from(Index n, const std::vector<std::tuple<Index, Index, double>> &entries) {
    SkewMatrixd m(n);
    for (const auto &[i, j, v] : entries)
        m.set(i, j, v);
    return m;
}

SkewMatrixd clique(Index n, const std::vector<Index> &nodes, double v = 1.0) {
    SkewMatrixd m(n);
    for (std::size_t a = 0; a < nodes.size(); ++a)
        for (std::size_t b = a + 1; b < nodes.size(); ++b)
            m.set(nodes[a], nodes[b], v);
    return m;
}

std::vector<Index> observed_positions(const LdgModel &m) {
    std::vector<Index> pos(m.n(), -1);
    for (Index k = 0; k < m.n_observed(); ++k)
        pos[m.observed()[k]] = k;
    return pos;
}

std::vector<LdgModel> admissible_models(int count, std::uint64_t first_seed, bool strict_nodes) {
    std::vector<LdgModel> out;
    for (int k = 0; k < count; ++k) {
        GeneratorConfig cfg;
        cfg.seed = first_seed + k;
        cfg.n_hidden = 1 + k % 3;
        cfg.n = 12 + 8 * (cfg.n_hidden - 1) + k % 4;
        cfg.strict_blanket_nodes = strict_nodes;
        if (strict_nodes)
            cfg.max_parents = 2;
        out.push_back(generate_random_network(cfg));
    }
    return out;
}

SkewMatrixd imag_skew(const Eigen::MatrixXcd &m) { return SkewMatrixd::project(m.imag()); }

} // namespace

TEST_CASE("observable_edges") {
    CHECK(observable_edges(SkewMatrixd(4), 1e-6).empty());
    const auto e = observable_edges(skew_from(4, {{0, 2, -0.5}, {1, 3, 1e-8}, {3, 2, 0.1}}), 1e-6);
    CHECK(e == std::set<UEdge>{{0, 2}, {2, 3}});
    CHECK_THROWS_AS(observable_edges(SkewMatrixd(2), 0.0), ParameterError);
}

TEST_CASE("hidden_components") {
    CHECK(hidden_components(SkewMatrixd(5), 1e-6).empty());

    const auto two = hidden_components(clique(8, {0, 1, 2}) + clique(8, {4, 6, 7, 5}, -2.0), 1e-6);
    REQUIRE(two.size() == 2);
    CHECK(two[0].M == std::vector<Index>{0, 1, 2});
    CHECK(two[1].M == std::vector<Index>{4, 5, 6, 7});
    CHECK(two[0].alpha == 2);
    CHECK(two[1].alpha == 3);
    CHECK(two[0].attach_all);
    CHECK(two[1].Q.size() == 6);

    // Path 0-1-2: the middle node is full degree.
    const auto path = hidden_components(skew_from(3, {{0, 1, 1}, {1, 2, 1}}), 1e-6);
    REQUIRE(path.size() == 1);
    CHECK(path[0].d_h == std::vector<Index>{1});
    CHECK(path[0].M_tilde == std::vector<Index>{0, 2});
    CHECK_FALSE(path[0].attach_all);
    for (const auto &[v, d] : path[0].degrees)
        CHECK(d <= path[0].alpha);
}

TEST_CASE("attach_hidden") {
    const auto triangle = hidden_components(clique(4, {0, 1, 3}), 1e-6).front();
    CHECK(attach_hidden(triangle, {}) == std::vector<Index>{0, 1, 3});

    // Blanket {c, p1, p2}: hidden node h has child c and the two strict
    // parents p1, p2 of c. The parents are not joined in Q; both touch the
    // full-degree child. p1 keeps no observed edge to c, so it is attached.
    const Index c = 0, p1 = 1, p2 = 2;
    const auto parents = hidden_components(skew_from(3, {{c, p1, 1}, {c, p2, 1}}), 1e-6).front();
    CHECK(parents.d_h == std::vector<Index>{c});
    CHECK(attach_hidden(parents, {{c, p2}}) == std::vector<Index>{c, p1});
    CHECK(attach_hidden(parents, {}) == std::vector<Index>{c, p1, p2});

    // Children a, b of h each have one strict spouse (s1, s2). The spouses
    // have observed edges to the children, so neither is attached.
    const Index a = 0, b = 1, s1 = 2, s2 = 3;
    const auto spouses =
        hidden_components(skew_from(4, {{a, b, 1}, {a, s1, 1}, {b, s1, 1}, {a, s2, 1}, {b, s2, 1}}), 1e-6)
            .front();
    CHECK(spouses.d_h == std::vector<Index>{a, b});
    CHECK(attach_hidden(spouses, {{a, s1}, {b, s2}}) == std::vector<Index>{a, b});

    HiddenComponent empty;
    CHECK_THROWS_AS(attach_hidden(empty, {}), DomainError);
}

TEST_CASE("full_topology") {
    const SkewMatrixd S = skew_from(5, {{0, 1, 0.4}, {2, 3, -0.2}});
    const auto observed_only = full_topology(S, SkewMatrixd(5));
    CHECK(observed_only.n_hidden == 0);
    CHECK(observed_only.edges == std::set<UEdge>{{0, 1}, {2, 3}});

    const SkewMatrixd L = clique(5, {2, 3, 4}, 3.0);
    const auto t = full_topology(S, L);
    CHECK(t.n_hidden == 1);
    CHECK(t.hidden_neighbors(0) == std::set<Index>{2, 3, 4});
    CHECK(t.observed_edges() == observed_only.edges);
    const auto again = full_topology(S, L);
    CHECK(again.edges == t.edges);

    // Scaling both inputs leaves the answer unchanged.
    CHECK(full_topology(1e-9 * S, 1e-9 * L).edges == t.edges);
    for (Index l = 0; l < t.n_hidden; ++l)
        CHECK(t.hidden_neighbors(l).size() >= 2);
}

TEST_CASE("majority_topology") {
    ReconstructedTopology clean;
    clean.n_observed = 5;
    clean.n_hidden = 2;
    clean.edges = {{0, 1}, {0, 5}, {1, 5}, {2, 6}, {3, 6}, {4, 6}};

    // Same topology with the hidden nodes listed in the other order.
    ReconstructedTopology swapped = clean;
    swapped.edges = {{0, 1}, {0, 6}, {1, 6}, {2, 5}, {3, 5}, {4, 5}};
    ReconstructedTopology noisy = clean;
    noisy.edges.insert({2, 3});
    noisy.edges.insert({4, 5});
    ReconstructedTopology merged = clean;
    merged.n_hidden = 1;
    merged.edges = {{0, 1}, {0, 5}, {1, 5}, {2, 5}};

    const auto vote = majority_topology({noisy, swapped, clean, merged});
    CHECK(vote.n_hidden == 2);
    CHECK(vote.edges == clean.edges);
    CHECK(majority_topology({noisy, swapped, clean}).edges == clean.edges);
    CHECK(majority_topology({merged}).edges == merged.edges);

    ReconstructedTopology other = clean;
    other.n_observed = 4;
    CHECK_THROWS_AS(majority_topology({clean, other}), DimensionError);
    CHECK_THROWS_AS(majority_topology({}), DomainError);
}

TEST_CASE("dm_path_exists") {
    // h = 0 hidden; i = 1, j = 2.
    const auto fork = oracle::make_model(3, {{0, 1}, {0, 2}}, {0});
    CHECK(dm_path_exists(fork, 1, 2, 0).de);
    CHECK_FALSE(dm_path_exists(fork, 1, 2, 0).ss);

    const auto collider = oracle::make_model(3, {{1, 0}, {2, 0}}, {0});
    CHECK_FALSE(dm_path_exists(collider, 1, 2, 0).de);
    CHECK(dm_path_exists(collider, 1, 2, 0).ss);
    CHECK(dm_path_exists(collider, 2, 1, 0).ss);

    const auto far = oracle::make_model(4, {{0, 1}, {2, 3}}, {0});
    const auto none = dm_path_exists(far, 1, 2, 0);
    CHECK_FALSE(none.de);
    CHECK_FALSE(none.ss);

    // Spouse of a hidden child through an observed grandchild: i -> k <- h.
    const auto spouse = oracle::make_model(4, {{1, 3}, {0, 3}, {0, 2}}, {0});
    CHECK(dm_path_exists(spouse, 1, 3, 0).de);
    CHECK_THROWS_AS(dm_path_exists(spouse, 1, 0, 0), DomainError);
}

TEST_CASE("evaluate") {
    const auto truth = oracle::make_model(5, {{0, 1}, {1, 2}, {4, 2}, {4, 3}}, {4});
    ReconstructedTopology exact;
    exact.n_observed = 4;
    exact.n_hidden = 1;
    exact.edges = {{0, 1}, {1, 2}, {2, 4}, {3, 4}};
    const auto m = evaluate(exact, truth);
    CHECK(m.exact_match);
    CHECK(m.observed_precision == 1.0);
    CHECK(m.observed_recall == 1.0);
    CHECK(m.hidden_precision == 1.0);
    CHECK(m.hidden_recall == 1.0);
    CHECK(m.matches == std::vector<Index>{0});

    ReconstructedTopology missing = exact;
    missing.edges.erase({0, 1});
    const auto mm = evaluate(missing, truth);
    CHECK(mm.observed_recall < 1.0);
    CHECK(mm.observed_precision == 1.0);
    CHECK_FALSE(mm.exact_match);

    ReconstructedTopology extra = exact;
    extra.n_hidden = 2;
    extra.edges.insert({0, 5});
    extra.edges.insert({1, 5});
    const auto me = evaluate(extra, truth);
    CHECK_FALSE(me.exact_match);
    CHECK(me.hidden_count_delta == 1);
    CHECK(me.matches[1] == -1);

    CHECK(m.single_spouse_hidden == std::vector<Index>{4});
    // Observed nodes 0 and 1 both share child 2 with hidden node 4.
    const auto spouse = oracle::make_model(5, {{0, 1}, {1, 2}, {4, 2}, {4, 3}, {0, 2}}, {4});
    CHECK(evaluate(exact, spouse).single_spouse_hidden.empty());
    const auto lone = oracle::make_model(5, {{0, 1}, {4, 2}, {4, 3}, {0, 2}}, {4});
    CHECK(evaluate(exact, lone).single_spouse_hidden == std::vector<Index>{4});

    ReconstructedTopology wrong_size = exact;
    wrong_size.n_observed = 3;
    CHECK_THROWS_AS(evaluate(wrong_size, truth), DimensionError);
}

TEST_CASE("ground-truth L is explained by unique hidden nodes") {
    for (const LdgModel &m : admissible_models(12, 500, false)) {
        const auto gt = sl_ground_truth(m, kZ);
        const double scale = gt.L.cwiseAbs().maxCoeff();
        const auto &obs = m.observed();
        for (Index a = 0; a < m.n_observed(); ++a)
            for (Index b = a + 1; b < m.n_observed(); ++b) {
                if (std::abs(gt.L(a, b)) <= 1e-9 * scale)
                    continue;
                int owners = 0;
                for (Index h : m.hidden()) {
                    const auto d = dm_path_exists(m, obs[a], obs[b], h);
                    owners += d.de || d.ss;
                }
                CHECK(owners == 1);
            }
    }
}

TEST_CASE("components of ground-truth L are the hidden blankets") {
    for (const LdgModel &m : admissible_models(12, 600, false)) {
        const auto views = derive_views(m);
        const auto pos = observed_positions(m);
        const auto gt = sl_ground_truth(m, kZ);
        const double scale = gt.L.cwiseAbs().maxCoeff();
        std::set<std::set<Index>> blankets;
        for (Index h : m.hidden()) {
            std::set<Index> b;
            for (Index v : views.blanket(h))
                b.insert(pos[v]);
            blankets.insert(b);
        }
        for (const SkewMatrixd &part : {SkewMatrixd::project((gt.L.real() + gt.L.imag()) / scale),
                                        imag_skew(gt.L / scale)}) {
            const auto comps = hidden_components(part, 1e-9);
            CHECK(Index(comps.size()) == m.n_hidden());
            std::set<std::set<Index>> found;
            for (const auto &c : comps)
                found.insert(std::set<Index>(c.M.begin(), c.M.end()));
            CHECK(found == blankets);
        }
    }
}

TEST_CASE("deficient degrees come from strict parent or spouse pairs") {
    int with_pairs = 0, without_pairs = 0;
    for (const LdgModel &m : admissible_models(24, 700, true)) {
        const auto views = derive_views(m);
        const auto pos = observed_positions(m);
        const auto gt = sl_ground_truth(m, kZ);
        const auto comps = hidden_components(imag_skew(gt.L / gt.L.cwiseAbs().maxCoeff()), 1e-9);
        REQUIRE(Index(comps.size()) == m.n_hidden());
        for (Index h : m.hidden()) {
            const Index any = pos[*views.blanket(h).begin()];
            const auto it = std::find_if(comps.begin(), comps.end(), [&](const HiddenComponent &c) {
                return std::find(c.M.begin(), c.M.end(), any) != c.M.end();
            });
            REQUIRE(it != comps.end());
            const bool pairs = views.strict_parents(h).size() >= 2 || views.strict_spouses(h).size() >= 2;
            CHECK(!it->M_tilde.empty() == pairs);
            (pairs ? with_pairs : without_pairs)++;
        }
    }
    CHECK(with_pairs > 0);
    CHECK(without_pairs > 0);
}

TEST_CASE("exact spectra reconstruct the generating topology") {
    for (const LdgModel &m : admissible_models(6, 800, false)) {
        const auto gt = sl_ground_truth(m, kZ);
        const auto recon = full_topology(imag_skew(gt.S), imag_skew(gt.L));
        const auto metrics = evaluate(recon, m);
        CHECK(metrics.exact_match);
        CHECK(observable_edges(imag_skew(gt.S / gt.S.cwiseAbs().maxCoeff()), 1e-6).size() <=
              observed_views(m).top.size());
    }
}
