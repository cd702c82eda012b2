#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"

#include "skewnet/certificate.hpp"
#include "skewnet/decompose.hpp"
#include "skewnet/ldm.hpp"
#include "skewnet/spectral.hpp"
#include "skewnet/topology.hpp"

namespace skewnet::io {

using json = nlohmann::ordered_json;

/// Malformed or unreadable artifact.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Row-major CSV, 17 significant digits.
void write_matrix_csv(const std::filesystem::path &path, const Eigen::MatrixXd &m);
Eigen::MatrixXd read_matrix_csv(const std::filesystem::path &path);

json matrix_to_json(const Eigen::MatrixXd &m);
Eigen::MatrixXd matrix_from_json(const json &j);
/// Complex entries as [re, im] pairs.
json complex_matrix_to_json(const Eigen::MatrixXcd &m);
Eigen::MatrixXcd complex_matrix_from_json(const json &j);

/// Reads a matrix from .csv or .json, chosen by extension.
Eigen::MatrixXd read_matrix(const std::filesystem::path &path);

json model_to_json(const LdgModel &model);
LdgModel model_from_json(const json &j);
json assumptions_to_json(const AssumptionReport &report);
json generator_config_to_json(const GeneratorConfig &cfg);
/// Fields missing from j keep the values already in cfg.
void merge_generator_config(const json &j, GeneratorConfig &cfg);

json topology_to_json(const ReconstructedTopology &topo);
ReconstructedTopology topology_from_json(const json &j);
json metrics_to_json(const EvaluationMetrics &m);

json condition_report_to_json(const ConditionReport &r);
json certificate_to_json(const Certificate &c);
json sweep_summary_to_json(const SweepResult &sweep);
/// Columns t, diff_t, tol_t; tol_t left blank without ground truth.
void write_sweep_csv(const std::filesystem::path &path, const SweepResult &sweep,
                     const SkewMatrixd *S_true = nullptr, const SkewMatrixd *L_true = nullptr);

json spectral_bundle_to_json(const SpectralBundle &bundle);
SpectralBundle spectral_bundle_from_json(const json &j);
json error_budget_to_json(const ErrorBudget &b);

json read_json(const std::filesystem::path &path);
/// Two-space indentation and a trailing newline.
void write_json(const std::filesystem::path &path, const json &j);

/// Shortest decimal form that reads back to the same double.
std::string format_double(double v);

} // namespace skewnet::io
