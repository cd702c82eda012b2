#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include "skewnet/certificate.hpp"
#include "skewnet/decompose.hpp"
#include "skewnet/errors.hpp"
#include "skewnet/io.hpp"
#include "skewnet/ldm.hpp"
#include "skewnet/spectral.hpp"
#include "skewnet/topology.hpp"

namespace fs = std::filesystem;
using namespace skewnet;
using io::json;

namespace {

constexpr const char *kVersion = "skewnet 0.1.0";
constexpr const char *kDefaultFreq = "3pi/8";

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Angles such as "3pi/8", "-pi/2", "2*pi/3", "pi" or plain radians "1.178".
double parse_angle(const std::string &text) {
    static const std::regex with_pi(R"(\s*([+-]?)\s*(\d*\.?\d*)\s*\*?\s*pi\s*(?:/\s*(\d*\.?\d+))?\s*)",
                                    std::regex::icase);
    std::smatch m;
    if (std::regex_match(text, m, with_pi)) {
        double coef = m[2].length() ? std::stod(m[2].str()) : 1.0;
        if (m[1] == "-")
            coef = -coef;
        const double den = m[3].matched ? std::stod(m[3].str()) : 1.0;
        if (!(den != 0))
            throw UsageError("frequency '" + text + "': zero denominator");
        return coef * M_PI / den;
    }
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception &) {
        used = 0;
    }
    if (used == 0 || text.find_first_not_of(" \t", used) != std::string::npos)
        throw UsageError("cannot parse frequency '" + text + "' (use e.g. 3pi/8 or radians)");
    return v;
}

Complex on_circle(double angle) { return std::polar(1.0, angle); }

/// Config sections keyed by stage name; flags override their entries.
struct Context {
    json config = json::object();
    fs::path out = ".";

    json section(const char *name) const {
        return config.contains(name) ? config.at(name) : json::object();
    }
    template <typename T>
    T setting(const char *stage, const char *key, T fallback) const {
        const json s = section(stage);
        try {
            if (s.contains(key))
                return s.at(key).get<T>();
            if (config.contains(key) && !config.at(key).is_object())
                return config.at(key).get<T>();
        } catch (const json::exception &e) {
            throw io::FormatError(std::string("config ") + stage + "." + key + ": " + e.what());
        }
        return fallback;
    }
    fs::path file(const std::string &name) const {
        fs::create_directories(out);
        return out / name;
    }
};

json stamped(json body) {
    json out = {{"version", kVersion}};
    for (auto &[k, v] : body.items())
        out[k] = std::move(v);
    return out;
}

void emit(const Context &ctx, const std::string &name, const json &body) {
    io::write_json(ctx.file(name), stamped(body));
}

std::vector<double> frequency_angles(const Context &ctx, const char *stage,
                                     const std::vector<std::string> &flags) {
    std::vector<std::string> texts = flags;
    if (texts.empty()) {
        const json s = ctx.section(stage);
        if (s.contains("frequencies"))
            for (const auto &f : s.at("frequencies"))
                texts.push_back(f.is_string() ? f.get<std::string>() : f.dump());
        else if (ctx.config.contains("frequencies"))
            for (const auto &f : ctx.config.at("frequencies"))
                texts.push_back(f.is_string() ? f.get<std::string>() : f.dump());
    }
    if (texts.empty())
        texts.push_back(kDefaultFreq);
    std::vector<double> out;
    for (const auto &t : texts)
        out.push_back(parse_angle(t));
    return out;
}

SkewMatrixd imag_skew(const Eigen::MatrixXcd &m) {
    return SkewMatrixd::project(Eigen::MatrixXd(m.imag()));
}

bool is_model_json(const json &j) { return j.contains("edges") && j.contains("node_filters"); }
bool is_bundle_json(const json &j) { return j.contains("ipsdm") && j.contains("frequencies"); }

// generate

struct GenerateArgs {
    std::optional<std::uint64_t> seed;
    std::optional<Index> n, hidden;
};

int cmd_generate(const Context &ctx, const GenerateArgs &a) {
    GeneratorConfig cfg;
    io::merge_generator_config(ctx.section("generate"), cfg);
    cfg.seed = a.seed.value_or(ctx.setting<std::uint64_t>("generate", "seed", cfg.seed));
    if (a.n)
        cfg.n = *a.n;
    if (a.hidden)
        cfg.n_hidden = *a.hidden;
    const LdgModel model = generate_random_network(cfg);
    const AssumptionReport report = check_assumptions(model);
    emit(ctx, "model.json", io::model_to_json(model));
    emit(ctx, "assumptions.json",
         {{"generator", io::generator_config_to_json(cfg)},
          {"report", io::assumptions_to_json(report)}});
    std::cout << "model: " << model.n() << " nodes, " << model.n_hidden() << " hidden, "
              << model.edges().size() << " edges; assumptions "
              << (report.all_hold() ? "all hold" : "NOT all hold") << "\n";
    return 0;
}

// simulate

struct SimulateArgs {
    std::string model;
    std::optional<std::uint64_t> seed;
    std::optional<Index> samples, burn_in;
    bool all_nodes = false;
};

int cmd_simulate(const Context &ctx, const SimulateArgs &a) {
    const LdgModel model = io::model_from_json(io::read_json(a.model));
    const Index samples = a.samples.value_or(ctx.setting<Index>("simulate", "samples", 10000));
    const Index burn = a.burn_in.value_or(ctx.setting<Index>("simulate", "burn_in", 2000));
    const auto seed = a.seed.value_or(ctx.setting<std::uint64_t>("simulate", "seed", 1));
    const Eigen::MatrixXd X = simulate(model, samples, seed, burn);
    Eigen::MatrixXd rows;
    if (a.all_nodes) {
        rows = X.transpose();
    } else {
        rows.resize(samples, model.n_observed());
        for (Index k = 0; k < model.n_observed(); ++k)
            rows.col(k) = X.row(model.observed()[k]).transpose();
    }
    io::write_matrix_csv(ctx.file("series.csv"), rows);
    std::cout << "series: " << rows.rows() << " samples of " << rows.cols() << " nodes\n";
    return 0;
}

// estimate

struct EstimateArgs {
    std::string series;
    std::optional<Index> p;
    std::vector<std::string> freqs;
    std::optional<double> trunc_eps;
};

/// Truncation order from the decay of the sample autocorrelations, using only
/// lags that stand above the sampling noise floor.
Index auto_order(const Eigen::MatrixXd &X, double trunc_eps, Index max_p) {
    const Index N = X.cols();
    const double floor_factor = 4.0 / std::sqrt(static_cast<double>(N));
    std::vector<Eigen::MatrixXd> R{estimate_autocorr(X, 0)};
    const double r0 = R.front().cwiseAbs().maxCoeff();
    for (Index k = 1; k <= std::min<Index>(20, max_p); ++k) {
        Eigen::MatrixXd r = estimate_autocorr(X, k);
        if (R.size() >= 3 && r.cwiseAbs().maxCoeff() < floor_factor * r0)
            break;
        R.push_back(std::move(r));
    }
    if (R.size() < 3)
        return std::min<Index>(1, max_p);
    const MixingFit fit = fit_mixing(R);
    return std::min(truncation_order(fit.rho, fit.C1, trunc_eps * r0), max_p);
}

int cmd_estimate(const Context &ctx, const EstimateArgs &a) {
    const Eigen::MatrixXd X = io::read_matrix_csv(a.series).transpose();
    if (X.size() == 0)
        throw io::FormatError(a.series + ": empty series");
    const Index max_p = X.cols() - X.rows();
    if (max_p < 0)
        throw ParameterError("estimate: fewer samples than nodes");
    Index p;
    if (a.p) {
        p = *a.p;
    } else if (ctx.section("estimate").contains("p")) {
        p = ctx.setting<Index>("estimate", "p", 0);
    } else {
        p = auto_order(X, a.trunc_eps.value_or(ctx.setting("estimate", "truncation_eps", 0.01)),
                       max_p);
    }
    std::vector<Complex> zs;
    for (double w : frequency_angles(ctx, "estimate", a.freqs))
        zs.push_back(on_circle(w));
    const SpectralBundle bundle = estimate_spectra(X, p, zs);
    emit(ctx, "spectral.json", io::spectral_bundle_to_json(bundle));
    std::cout << "spectra: p = " << p << ", N = " << bundle.N << ", " << zs.size()
              << " frequencies\n";
    return 0;
}

// decompose

struct DecomposeArgs {
    std::string input;
    std::vector<std::string> freqs;
    std::optional<double> epsilon, zero_tol, tau;
    std::string ground_truth;
};

int cmd_decompose(const Context &ctx, const DecomposeArgs &a) {
    const auto angles = frequency_angles(ctx, "decompose", a.freqs);
    if (angles.size() != 1)
        throw UsageError("decompose takes a single frequency");
    const Complex z = on_circle(angles.front());

    SkewMatrixd C;
    const fs::path in = a.input;
    if (in.extension() == ".json") {
        const json j = io::read_json(in);
        if (is_model_json(j)) {
            C = imag_skew(ipsdm_observed(io::model_from_json(j), z));
        } else if (is_bundle_json(j)) {
            const SpectralBundle b = io::spectral_bundle_from_json(j);
            if (b.frequencies.empty())
                throw io::FormatError("spectral bundle has no frequencies");
            std::size_t best = 0;
            for (std::size_t k = 1; k < b.frequencies.size(); ++k)
                if (std::abs(b.frequencies[k] - z) < std::abs(b.frequencies[best] - z))
                    best = k;
            if (std::abs(b.frequencies[best] - z) > 1e-9)
                std::cerr << "warning: bundle has no entry at the requested frequency; using "
                          << std::arg(b.frequencies[best]) << " rad\n";
            C = imag_skew(b.ipsdm[best]);
        } else {
            C = SkewMatrixd::checked(io::matrix_from_json(j), 1e-9);
        }
    } else {
        C = SkewMatrixd::checked(io::read_matrix(in), 1e-9);
    }

    SweepOptions opts;
    opts.zero_tol = a.zero_tol.value_or(ctx.setting("decompose", "zero_tol", opts.zero_tol));
    opts.solver.max_iter = ctx.setting("decompose", "max_iter", opts.solver.max_iter);
    const double epsilon = a.epsilon.value_or(ctx.setting("decompose", "epsilon", 0.01));
    if (!(epsilon > 0 && epsilon <= 0.5))
        throw UsageError("--epsilon must lie in (0, 0.5]");
    const double tau = a.tau.value_or(ctx.setting("decompose", "tau", 1e-6));

    std::optional<SkewMatrixd> S_true, L_true;
    if (!a.ground_truth.empty()) {
        const auto gt = sl_ground_truth(io::model_from_json(io::read_json(a.ground_truth)), z);
        S_true = imag_skew(gt.S);
        L_true = imag_skew(gt.L);
        if (S_true->n() != C.n())
            throw DimensionError("ground-truth model does not match the input dimension");
    }

    const SweepResult sweep = sweep_t(C, epsilon, opts);
    io::write_sweep_csv(ctx.file("sweep.csv"), sweep, S_true ? &*S_true : nullptr,
                        L_true ? &*L_true : nullptr);
    json summary = io::sweep_summary_to_json(sweep);
    summary["frequency"] = angles.front();

    json condition = nullptr, certificate = nullptr;
    if (sweep.selected_t) {
        const DecompositionSolution &sol = sweep.selected().solution;
        io::write_matrix_csv(ctx.file("S_hat.csv"), sol.S_hat.matrix());
        io::write_matrix_csv(ctx.file("L_hat.csv"), sol.L_hat.matrix());
        summary["selected"] = {{"t", sol.t},
                               {"gamma", sol.gamma},
                               {"iterations", sol.iterations},
                               {"primal_residual", sol.primal_residual},
                               {"converged", sol.converged}};
        const double scale = C.matrix().cwiseAbs().maxCoeff();
        if (scale > 0) {
            const SkewMatrixd Cn = (1.0 / scale) * C, Sn = (1.0 / scale) * sol.S_hat,
                              Ln = (1.0 / scale) * sol.L_hat;
            if (Sn.matrix().cwiseAbs().maxCoeff() > tau && Ln.matrix().cwiseAbs().maxCoeff() > tau)
                condition = io::condition_report_to_json(condition_report(Sn, Ln, tau, tau));
            certificate = io::certificate_to_json(certify(Cn, Sn, Ln, sol.gamma, tau, tau));
        }
    } else {
        io::write_matrix_csv(ctx.file("S_hat.csv"), C.matrix());
        io::write_matrix_csv(ctx.file("L_hat.csv"), Eigen::MatrixXd::Zero(C.n(), C.n()));
    }
    emit(ctx, "sweep.json", summary);
    emit(ctx, "condition.json", {{"condition", condition}});
    emit(ctx, "certificate.json", {{"certificate", certificate}});

    if (!summary.at("all_converged").get<bool>())
        std::cerr << "warning: the solver did not converge at every grid point\n";
    std::cout << "sweep: " << sweep.points.size() << " points, " << sweep.zero_regions.size()
              << " zero regions";
    if (sweep.selected_t)
        std::cout << ", selected t = " << *sweep.selected_t
                  << (sweep.certified ? "" : " (fallback window, not certified)");
    std::cout << "\n";
    return 0;
}

// reconstruct

struct ReconstructArgs {
    std::vector<std::string> S, L;
    std::optional<double> tau;
};

int cmd_reconstruct(const Context &ctx, const ReconstructArgs &a) {
    if (a.S.size() != a.L.size())
        throw UsageError("reconstruct needs one --L for every --S");
    const double tau = a.tau.value_or(ctx.setting("reconstruct", "tau", 1e-6));
    std::vector<ReconstructedTopology> runs;
    for (std::size_t k = 0; k < a.S.size(); ++k) {
        const SkewMatrixd S = SkewMatrixd::checked(io::read_matrix(a.S[k]), 1e-9);
        const SkewMatrixd L = SkewMatrixd::checked(io::read_matrix(a.L[k]), 1e-9);
        runs.push_back(full_topology(S, L, tau));
    }
    const ReconstructedTopology topo = runs.size() == 1 ? runs.front() : majority_topology(runs);
    emit(ctx, "topology.json", io::topology_to_json(topo));
    std::cout << "topology: " << topo.observed_edges().size() << " observed edges, "
              << topo.n_hidden << " hidden nodes";
    if (runs.size() > 1)
        std::cout << " (majority of " << runs.size() << " frequencies)";
    std::cout << "\n";
    return 0;
}

// evaluate

struct EvaluateArgs {
    std::string topology, ground_truth;
    bool kin = false;
};

int cmd_evaluate(const Context &ctx, const EvaluateArgs &a) {
    const ReconstructedTopology topo = io::topology_from_json(io::read_json(a.topology));
    const LdgModel truth = io::model_from_json(io::read_json(a.ground_truth));
    if (topo.n_observed != truth.n_observed())
        throw DimensionError("evaluate: topology has " + std::to_string(topo.n_observed) +
                             " observed nodes, model has " + std::to_string(truth.n_observed()));
    const EvaluationMetrics m = evaluate(topo, truth, a.kin);
    emit(ctx, "metrics.json", io::metrics_to_json(m));
    std::cout << std::left << std::setw(22) << "metric" << "value\n"
              << std::setw(22) << "observed precision" << m.observed_precision << "\n"
              << std::setw(22) << "observed recall" << m.observed_recall << "\n"
              << std::setw(22) << "hidden (true/found)" << m.true_hidden << "/"
              << m.recovered_hidden << "\n"
              << std::setw(22) << "hidden precision" << m.hidden_precision << "\n"
              << std::setw(22) << "hidden recall" << m.hidden_recall << "\n"
              << std::setw(22) << "exact match" << (m.exact_match ? "yes" : "no") << "\n";
    if (!m.single_spouse_hidden.empty()) {
        std::cout << "note: hidden node(s)";
        for (Index h : m.single_spouse_hidden)
            std::cout << " " << h;
        std::cout << " have a single strict spouse; one false edge each is possible\n";
    }
    return 0;
}

// bounds

struct BoundsArgs {
    std::optional<double> rho, C1, eps, eps1, delta;
    std::optional<Index> n;
    std::string model;
    Index fit_lags = 30;
};

int cmd_bounds(const Context &ctx, const BoundsArgs &a) {
    const double eps = a.eps.value_or(ctx.setting("bounds", "eps", 0.1));
    const double delta = a.delta.value_or(ctx.setting("bounds", "delta", 0.05));
    // --epsilon bounds the truncation error and --eps1 the estimation error, so
    // the PSDM error budget is their sum.
    const double eps1 = a.eps1.value_or(ctx.setting("bounds", "eps1", eps));

    json out;
    if (!a.model.empty()) {
        const LdgModel model = io::model_from_json(io::read_json(a.model));
        MixingFit fit = fit_mixing(exact_autocorr(model, a.fit_lags));
        if (a.rho)
            fit.rho = *a.rho;
        if (a.C1)
            fit.C1 = *a.C1;
        const Index n = a.n.value_or(model.n_observed());
        out = io::error_budget_to_json(
            error_budget(fit, class_bounds(model), n, eps + eps1, delta, eps1));
        out["n"] = n;
    } else {
        const double rho = a.rho.value_or(ctx.setting("bounds", "rho", 0.5));
        const double C1 = a.C1.value_or(ctx.setting("bounds", "C1", 1.0));
        const Index n = a.n.value_or(ctx.setting<Index>("bounds", "n", 10));
        const Index p = truncation_order(rho, C1, eps);
        out = {{"rho", rho},
               {"C1", C1},
               {"eps", eps + eps1},
               {"eps1", eps1},
               {"p_min", p},
               {"N_min", sample_bound(eps1, p, n, C1, delta)},
               {"n", n},
               {"confidence", 1 - delta}};
    }
    emit(ctx, "budget.json", out);
    std::cout << "budget: p = " << out.at("p_min") << ", N = " << out.at("N_min") << "\n";
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Topology recovery of networks with hidden nodes from skew-symmetric "
                 "sparse plus low-rank decompositions"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::string config_path, out_dir = ".";
    app.add_option("--config", config_path, "JSON config with per-stage sections")
        ->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "Output directory");

    GenerateArgs gen;
    auto *g = app.add_subcommand("generate", "Random admissible network and assumption report");
    g->add_option("--seed", gen.seed);
    g->add_option("--n", gen.n, "Total node count");
    g->add_option("--hidden", gen.hidden, "Hidden node count");

    SimulateArgs sim;
    auto *s = app.add_subcommand("simulate", "Time series of the observed nodes");
    s->add_option("--model", sim.model)->required()->check(CLI::ExistingFile);
    s->add_option("--samples", sim.samples);
    s->add_option("--burn-in", sim.burn_in);
    s->add_option("--seed", sim.seed);
    s->add_flag("--all-nodes", sim.all_nodes, "Include hidden nodes");

    EstimateArgs est;
    auto *e = app.add_subcommand("estimate", "PSDM and IPSDM estimates from a series");
    e->add_option("--series", est.series)->required()->check(CLI::ExistingFile);
    e->add_option("--p", est.p, "Truncation order (default: fitted)");
    e->add_option("--freq", est.freqs, "Frequencies, e.g. 3pi/8");
    e->add_option("--truncation-eps", est.trunc_eps,
                  "Target truncation error relative to ||R(0)|| for the fitted order");

    DecomposeArgs dec;
    auto *d = app.add_subcommand("decompose", "Penalty sweep and selected decomposition");
    d->add_option("--input", dec.input, "Skew matrix (.csv/.json), model or spectral bundle")
        ->required()
        ->check(CLI::ExistingFile);
    d->add_option("--freq", dec.freqs, "Frequency for model or bundle input");
    d->add_option("--epsilon", dec.epsilon, "Sweep step");
    d->add_option("--zero-tol", dec.zero_tol, "Zero-region threshold relative to ||C||_F");
    d->add_option("--tau", dec.tau, "Support threshold for the certificate");
    d->add_option("--ground-truth", dec.ground_truth, "Model for the tol_t column")
        ->check(CLI::ExistingFile);

    ReconstructArgs rec;
    auto *r = app.add_subcommand("reconstruct", "Topology with hidden nodes from S and L");
    r->add_option("--S", rec.S, "Sparse part; repeat with --L for a majority over frequencies")
        ->required()
        ->check(CLI::ExistingFile);
    r->add_option("--L", rec.L, "Low-rank part, paired with --S in order")
        ->required()
        ->check(CLI::ExistingFile);
    r->add_option("--tau", rec.tau);

    EvaluateArgs ev;
    auto *v = app.add_subcommand("evaluate", "Score a topology against a model");
    v->add_option("--topology", ev.topology)->required()->check(CLI::ExistingFile);
    v->add_option("--ground-truth", ev.ground_truth)->required()->check(CLI::ExistingFile);
    v->add_flag("--kin", ev.kin, "Score observed edges against kin(G)");

    BoundsArgs bnd;
    auto *b = app.add_subcommand("bounds", "Truncation order and sample count");
    b->add_option("--rho", bnd.rho);
    b->add_option("--C1", bnd.C1);
    b->add_option("--epsilon", bnd.eps, "Truncation error target");
    b->add_option("--eps1", bnd.eps1, "Estimation error target (default: --epsilon)");
    b->add_option("--delta", bnd.delta);
    b->add_option("--n", bnd.n);
    b->add_option("--model", bnd.model, "Fit rho and C1 from a model")
        ->check(CLI::ExistingFile);
    b->add_option("--fit-lags", bnd.fit_lags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &err) {
        return app.exit(err) == 0 ? 0 : 1;
    }

    try {
        Context ctx;
        ctx.out = out_dir;
        if (!config_path.empty())
            ctx.config = io::read_json(config_path);
        if (*g)
            return cmd_generate(ctx, gen);
        if (*s)
            return cmd_simulate(ctx, sim);
        if (*e)
            return cmd_estimate(ctx, est);
        if (*d)
            return cmd_decompose(ctx, dec);
        if (*r)
            return cmd_reconstruct(ctx, rec);
        if (*v)
            return cmd_evaluate(ctx, ev);
        if (*b)
            return cmd_bounds(ctx, bnd);
    } catch (const GenerationError &err) {
        std::cerr << "generation failed: " << err.what() << "\n";
        return 3;
    } catch (const ConditioningError &err) {
        std::cerr << "numerical failure: " << err.what() << " (condition " << err.condition
                  << ")\n";
        return 2;
    } catch (const NumericalError &err) {
        std::cerr << "numerical failure: " << err.what() << "\n";
        return 2;
    } catch (const SimulationError &err) {
        std::cerr << "numerical failure: " << err.what() << "\n";
        return 2;
    } catch (const std::exception &err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 1;
}
