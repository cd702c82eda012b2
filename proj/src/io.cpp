#include "skewnet/io.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace skewnet::io {

namespace {

std::ifstream open_in(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in)
        throw FormatError("cannot open " + path.string());
    return in;
}

std::ofstream open_out(const std::filesystem::path &path) {
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw FormatError("cannot write " + path.string());
    return out;
}

json interval_json(const std::optional<Interval> &iv) {
    if (!iv)
        return nullptr;
    return json{{"lo", iv->lo}, {"hi", iv->hi}};
}

std::string node_label(Index k, Index n_observed) {
    return k < n_observed ? std::to_string(k) : "h" + std::to_string(k - n_observed + 1);
}

template <typename T>
T get_or(const json &j, const char *key, T fallback) {
    return j.contains(key) ? j.at(key).get<T>() : fallback;
}

} // namespace

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_matrix_csv(const std::filesystem::path &path, const Eigen::MatrixXd &m) {
    auto out = open_out(path);
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j)
            out << (j ? "," : "") << format_double(m(i, j));
        out << '\n';
    }
}

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path &path) {
    auto in = open_in(path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r")
            continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            std::size_t used = 0;
            double v = 0;
            try {
                v = std::stod(cell, &used);
            } catch (const std::exception &) {
                used = 0;
            }
            if (used == 0 || cell.find_first_not_of(" \t\r", used) != std::string::npos)
                throw FormatError(path.string() + ": not a number: '" + cell + "'");
            row.push_back(v);
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw FormatError(path.string() + ": ragged rows");
        rows.push_back(std::move(row));
    }
    Eigen::MatrixXd m(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            m(i, j) = rows[i][j];
    return m;
}

json matrix_to_json(const Eigen::MatrixXd &m) {
    json entries = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Index j = 0; j < m.cols(); ++j)
            row.push_back(m(i, j));
        entries.push_back(std::move(row));
    }
    return {{"n", m.rows()}, {"entries", std::move(entries)}};
}

Eigen::MatrixXd matrix_from_json(const json &j) {
    try {
        const auto &entries = j.at("entries");
        const Index n = j.at("n").get<Index>();
        if (static_cast<Index>(entries.size()) != n)
            throw FormatError("matrix JSON: row count differs from n");
        Eigen::MatrixXd m(n, n);
        for (Index i = 0; i < n; ++i) {
            if (static_cast<Index>(entries[i].size()) != n)
                throw FormatError("matrix JSON: row " + std::to_string(i) + " has wrong length");
            for (Index k = 0; k < n; ++k)
                m(i, k) = entries[i][k].get<double>();
        }
        return m;
    } catch (const json::exception &e) {
        throw FormatError(std::string("matrix JSON: ") + e.what());
    }
}

json complex_matrix_to_json(const Eigen::MatrixXcd &m) {
    json entries = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Index j = 0; j < m.cols(); ++j)
            row.push_back({m(i, j).real(), m(i, j).imag()});
        entries.push_back(std::move(row));
    }
    return {{"n", m.rows()}, {"entries", std::move(entries)}};
}

Eigen::MatrixXcd complex_matrix_from_json(const json &j) {
    try {
        const Index n = j.at("n").get<Index>();
        Eigen::MatrixXcd m(n, n);
        for (Index i = 0; i < n; ++i)
            for (Index k = 0; k < n; ++k) {
                const auto &c = j.at("entries").at(i).at(k);
                m(i, k) = Complex(c.at(0).get<double>(), c.at(1).get<double>());
            }
        return m;
    } catch (const json::exception &e) {
        throw FormatError(std::string("complex matrix JSON: ") + e.what());
    }
}

Eigen::MatrixXd read_matrix(const std::filesystem::path &path) {
    if (path.extension() == ".json")
        return matrix_from_json(read_json(path));
    return read_matrix_csv(path);
}

json model_to_json(const LdgModel &model) {
    json edges = json::array();
    for (const auto &e : model.edges()) {
        json je = {{"from", e.from}, {"to", e.to}, {"gain", e.gain}};
        if (!e.taps.empty())
            je["taps"] = e.taps;
        edges.push_back(std::move(je));
    }
    json noise = json::array();
    for (const auto &ns : model.noise())
        noise.push_back(ns.shaped() ? json{{"taps", ns.taps}} : json{{"variance", ns.variance}});
    return {{"n", model.n()},
            {"hidden", model.hidden()},
            {"node_filters", model.node_filters()},
            {"noise", std::move(noise)},
            {"edges", std::move(edges)}};
}

LdgModel model_from_json(const json &j) {
    try {
        const Index n = j.at("n").get<Index>();
        std::vector<EdgeFilter> edges;
        for (const auto &je : j.at("edges"))
            edges.push_back({je.at("from").get<Index>(), je.at("to").get<Index>(),
                             je.at("gain").get<double>(),
                             get_or<std::vector<double>>(je, "taps", {})});
        std::vector<NoiseSpec> noise;
        for (const auto &jn : j.at("noise")) {
            NoiseSpec ns;
            ns.variance = get_or(jn, "variance", 1.0);
            ns.taps = get_or<std::vector<double>>(jn, "taps", {});
            noise.push_back(std::move(ns));
        }
        return LdgModel(n, std::move(edges),
                        j.at("node_filters").get<std::vector<std::vector<double>>>(),
                        std::move(noise), get_or<std::vector<Index>>(j, "hidden", {}));
    } catch (const json::exception &e) {
        throw FormatError(std::string("model JSON: ") + e.what());
    }
}

json assumptions_to_json(const AssumptionReport &report) {
    auto check = [](const AssumptionCheck &c) {
        return json{{"name", c.name}, {"holds", c.holds}, {"witnesses", c.witnesses}};
    };
    json list = json::array();
    for (const auto &a : report.assumptions)
        list.push_back(check(a));
    return {{"all_hold", report.all_hold()},
            {"well_posed", check(report.well_posed)},
            {"detectable", check(report.detectable)},
            {"assumptions", std::move(list)}};
}

json generator_config_to_json(const GeneratorConfig &c) {
    return {{"n", c.n},
            {"n_hidden", c.n_hidden},
            {"avg_degree", c.avg_degree},
            {"max_observed_degree", c.max_observed_degree},
            {"sibling_edges", c.sibling_edges},
            {"strict_blanket_nodes", c.strict_blanket_nodes},
            {"noise_min", c.noise_min},
            {"noise_max", c.noise_max},
            {"seed", c.seed},
            {"min_children", c.min_children},
            {"max_children", c.max_children},
            {"min_parents", c.min_parents},
            {"max_parents", c.max_parents},
            {"enforce", c.enforce},
            {"max_attempts", c.max_attempts},
            {"filter_spread", c.filter_spread},
            {"gain_budget", c.gain_budget}};
}

void merge_generator_config(const json &j, GeneratorConfig &c) {
    try {
        c.n = get_or(j, "n", c.n);
        c.n_hidden = get_or(j, "n_hidden", c.n_hidden);
        c.avg_degree = get_or(j, "avg_degree", c.avg_degree);
        c.max_observed_degree = get_or(j, "max_observed_degree", c.max_observed_degree);
        c.sibling_edges = get_or(j, "sibling_edges", c.sibling_edges);
        c.strict_blanket_nodes = get_or(j, "strict_blanket_nodes", c.strict_blanket_nodes);
        c.noise_min = get_or(j, "noise_min", c.noise_min);
        c.noise_max = get_or(j, "noise_max", c.noise_max);
        c.seed = get_or(j, "seed", c.seed);
        c.min_children = get_or(j, "min_children", c.min_children);
        c.max_children = get_or(j, "max_children", c.max_children);
        c.min_parents = get_or(j, "min_parents", c.min_parents);
        c.max_parents = get_or(j, "max_parents", c.max_parents);
        c.enforce = get_or(j, "enforce", c.enforce);
        c.max_attempts = get_or(j, "max_attempts", c.max_attempts);
        c.filter_spread = get_or(j, "filter_spread", c.filter_spread);
        c.gain_budget = get_or(j, "gain_budget", c.gain_budget);
    } catch (const json::exception &e) {
        throw FormatError(std::string("generator config: ") + e.what());
    }
}

json topology_to_json(const ReconstructedTopology &topo) {
    json observed = json::array(), hidden = json::array(), edges = json::array();
    for (Index k = 0; k < topo.n_observed; ++k)
        observed.push_back(node_label(k, topo.n_observed));
    for (Index l = 0; l < topo.n_hidden; ++l)
        hidden.push_back(node_label(topo.n_observed + l, topo.n_observed));
    for (const auto &[a, b] : topo.edges)
        edges.push_back({node_label(a, topo.n_observed), node_label(b, topo.n_observed)});
    return {{"observed", std::move(observed)},
            {"hidden", std::move(hidden)},
            {"edges", std::move(edges)}};
}

ReconstructedTopology topology_from_json(const json &j) {
    try {
        ReconstructedTopology t;
        std::map<std::string, Index> index;
        for (const auto &id : j.at("observed"))
            index.emplace(id.get<std::string>(), t.n_observed++);
        for (const auto &id : j.at("hidden"))
            index.emplace(id.get<std::string>(), t.n_observed + t.n_hidden++);
        if (static_cast<Index>(index.size()) != t.n_observed + t.n_hidden)
            throw FormatError("topology JSON: duplicate node id");
        auto lookup = [&](const json &id) {
            const auto it = index.find(id.get<std::string>());
            if (it == index.end())
                throw FormatError("topology JSON: unknown node id " + id.dump());
            return it->second;
        };
        for (const auto &e : j.at("edges")) {
            if (e.size() != 2)
                throw FormatError("topology JSON: edges must be pairs");
            const Index a = lookup(e.at(0)), b = lookup(e.at(1));
            if (a == b)
                throw FormatError("topology JSON: self loop");
            t.edges.insert(uedge(a, b));
        }
        return t;
    } catch (const json::exception &e) {
        throw FormatError(std::string("topology JSON: ") + e.what());
    }
}

json metrics_to_json(const EvaluationMetrics &m) {
    return {{"exact_match", m.exact_match},
            {"observed_precision", m.observed_precision},
            {"observed_recall", m.observed_recall},
            {"true_hidden", m.true_hidden},
            {"recovered_hidden", m.recovered_hidden},
            {"hidden_count_delta", m.hidden_count_delta},
            {"hidden_precision", m.hidden_precision},
            {"hidden_recall", m.hidden_recall},
            {"matches", m.matches},
            {"jaccard", m.jaccard},
            {"single_spouse_hidden", m.single_spouse_hidden}};
}

json condition_report_to_json(const ConditionReport &r) {
    return {{"mu", r.mu},
            {"mu_upper_bound_only", r.mu_upper_bound_only},
            {"xi", r.xi},
            {"deg_max", r.deg_max},
            {"inc", r.inc},
            {"product_mu_xi", r.product_mu_xi},
            {"product_deg_inc", r.product_deg_inc},
            {"gamma_range_muxi", interval_json(r.gamma_range_muxi)},
            {"gamma_range_deg_inc", interval_json(r.gamma_range_deg_inc)},
            {"transverse", r.transverse}};
}

json certificate_to_json(const Certificate &c) {
    return {{"valid", c.valid},
            {"reason", c.reason},
            {"inf_margin", c.inf_margin},
            {"spec_margin", c.spec_margin},
            {"support_match", c.support_match},
            {"uv_match", c.uv_match}};
}

json sweep_summary_to_json(const SweepResult &sweep) {
    json regions = json::array();
    for (const auto &r : sweep.zero_regions)
        regions.push_back({{"lo", r.lo}, {"hi", r.hi}});
    bool all_converged = true;
    for (const auto &p : sweep.points)
        all_converged = all_converged && p.solution.converged;
    return {{"epsilon", sweep.epsilon},
            {"points", sweep.points.size()},
            {"zero_regions", std::move(regions)},
            {"selected_t", sweep.selected_t ? json(*sweep.selected_t) : json(nullptr)},
            {"certified", sweep.certified},
            {"all_converged", all_converged}};
}

void write_sweep_csv(const std::filesystem::path &path, const SweepResult &sweep,
                     const SkewMatrixd *S_true, const SkewMatrixd *L_true) {
    auto out = open_out(path);
    out << "t,diff_t,tol_t\n";
    for (const auto &p : sweep.points) {
        out << format_double(p.t) << ',' << format_double(p.diff) << ',';
        if (S_true && L_true)
            out << format_double(compute_tol(p.solution, *S_true, *L_true));
        out << '\n';
    }
}

json spectral_bundle_to_json(const SpectralBundle &b) {
    json freqs = json::array(), psdm = json::array(), ipsdm = json::array();
    for (const auto &z : b.frequencies)
        freqs.push_back({z.real(), z.imag()});
    for (const auto &m : b.psdm)
        psdm.push_back(complex_matrix_to_json(m));
    for (const auto &m : b.ipsdm)
        ipsdm.push_back(complex_matrix_to_json(m));
    return {{"p", b.p},
            {"N", b.N},
            {"frequencies", std::move(freqs)},
            {"psdm", std::move(psdm)},
            {"ipsdm", std::move(ipsdm)}};
}

SpectralBundle spectral_bundle_from_json(const json &j) {
    try {
        SpectralBundle b;
        b.p = j.at("p").get<Index>();
        b.N = j.at("N").get<Index>();
        for (const auto &z : j.at("frequencies"))
            b.frequencies.emplace_back(z.at(0).get<double>(), z.at(1).get<double>());
        for (const auto &m : j.at("psdm"))
            b.psdm.push_back(complex_matrix_from_json(m));
        for (const auto &m : j.at("ipsdm"))
            b.ipsdm.push_back(complex_matrix_from_json(m));
        if (b.psdm.size() != b.frequencies.size() || b.ipsdm.size() != b.frequencies.size())
            throw FormatError("spectral bundle: one PSDM and IPSDM per frequency required");
        return b;
    } catch (const json::exception &e) {
        throw FormatError(std::string("spectral bundle: ") + e.what());
    }
}

json error_budget_to_json(const ErrorBudget &b) {
    return {{"rho", b.rho},
            {"C1", b.C1},
            {"eps", b.eps},
            {"eps1", b.eps1},
            {"p_min", b.p_min},
            {"N_min", b.N_min},
            {"confidence", b.confidence},
            {"l", b.class_bounds.l},
            {"L", b.class_bounds.L},
            {"sigma_e_max", b.class_bounds.sigma_e_max},
            {"sigma_e_min", b.class_bounds.sigma_e_min},
            {"ipsdm_bound", b.ipsdm_bound.vacuous ? json(nullptr) : json(b.ipsdm_bound.value)},
            {"ipsdm_bound_vacuous", b.ipsdm_bound.vacuous}};
}

json read_json(const std::filesystem::path &path) {
    auto in = open_in(path);
    try {
        return json::parse(in);
    } catch (const json::exception &e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void write_json(const std::filesystem::path &path, const json &j) {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

} // namespace skewnet::io
