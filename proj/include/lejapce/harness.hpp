#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "lejapce/external.hpp"
#include "lejapce/models.hpp"
#include "lejapce/postprocess.hpp"
#include "lejapce/surrogate.hpp"

namespace lejapce {

/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirVariable = "LEJAPCE_OUT_DIR";

/// Seeded cross-validation points and the model's values there.
struct CvSample {
  Eigen::MatrixXd points;
  Eigen::VectorXd values;
};

/// Throws DomainError when q < 1.
CvSample cv_sample(const Model& model, std::size_t q, std::uint64_t seed);

/// sqrt(mean((predictions - reference)^2)), summed in index order.
double cv_rms(const Eigen::VectorXd& predictions, const Eigen::VectorXd& reference);
double cv_rms(const Surrogate& s, const CvSample& sample);
double cv_rms(const Surrogate& s, const Model& model, std::size_t q, std::uint64_t seed);

/// |(reference - estimate) / reference|. Throws DomainError for a zero
/// reference.
double rel_error(double estimate, double reference);

struct SobolReference {
  std::size_t dimension = 0;
  std::string parameter;
  double first_order = 0.0;
  std::optional<double> total_order;
};

struct ReferenceStats {
  std::string model;
  std::optional<double> mean;
  std::optional<double> variance;
  std::string moment_source;
  std::vector<SobolReference> sobol;
  std::string sobol_source;
};

/// Reference statistics of a built-in model. Throws ConfigError for other
/// names.
ReferenceStats reference_oracles(const std::string& model_name);

enum class Method { Hier, PceDirect, PceTransform, TdFixed };

std::string to_string(Method method);
/// Throws ConfigError for unknown names.
Method method_from_string(const std::string& name);

struct ExperimentConfig {
  /// Built-in model name; ignored when `external` is set.
  std::string model = "ishigami";
  std::optional<ExternalModelSpec> external;
  /// Overrides the built-in input laws; required for external models.
  std::optional<ProductDistribution> distributions;
  Method method = Method::Hier;
  int p_max = 0;
  std::size_t budget = 100;
  double tolerance = 0.0;
  std::size_t cv_size = 10000;
  std::uint64_t seed = 1;
  /// Output directory; empty means nothing is written.
  std::string out_dir;
  std::string csv_name = "convergence.csv";
  std::string report_name = "report.json";
  std::string surrogate_name = "surrogate.json";
};

/// Throws ConfigError on unknown keys, wrong types or violated invariants.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);
void validate(const ExperimentConfig& cfg);

/// $LEJAPCE_OUT_DIR if set and non-empty, "." otherwise.
std::string default_output_dir();

/// The configured model with the configured input laws.
std::unique_ptr<Model> make_model(const ExperimentConfig& cfg);

struct ConvergenceRecord {
  std::size_t model_evaluations = 0;
  double cv_rms = 0.0;
  std::optional<double> mean_rel_err;
  std::optional<double> var_rel_err;
  /// Largest relative error over the non-zero referenced Sobol indices.
  std::optional<double> sobol_first_rel_err_max;
  std::optional<double> sobol_total_rel_err_max;
};

struct ExperimentResult {
  std::vector<ConvergenceRecord> records;
  Surrogate surrogate;
  /// Statistics of the final surrogate; empty indices when the variance is 0.
  SensitivityReport report;
  std::optional<ReferenceStats> references;
  std::size_t model_calls = 0;
};

/// Budgets 25, 50, 100, ... below `budget`, then `budget` itself.
std::vector<std::size_t> checkpoint_schedule(std::size_t budget);

/// Runs the configured method at every checkpoint, reusing one evaluation
/// cache, and records the CV error and the errors against `references`.
/// Checkpoints that add no evaluations are skipped.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const Model& model,
                                const std::optional<ReferenceStats>& references);
/// Builds the model and picks built-in references, then runs.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Columns evals, cv_rms, err_mean, err_var, err_Sf_max, err_St_max; missing
/// errors are left empty.
std::string convergence_csv(const std::vector<ConvergenceRecord>& records);

/// Mean, variance and Sobol indices with parameter names.
nlohmann::json sensitivity_json(const SensitivityReport& report, const std::vector<std::string>& names);
/// Flat CSV with columns dimension, S_f, S_t.
std::string sensitivity_csv(const SensitivityReport& report, const std::vector<std::string>& names);

nlohmann::json experiment_report(const ExperimentConfig& cfg, const ExperimentResult& result,
                                 const std::vector<std::string>& names);

/// Writes the CSV, report and surrogate into cfg.out_dir (created if needed).
void write_outputs(const ExperimentConfig& cfg, const ExperimentResult& result, const std::vector<std::string>& names);

/// Names for reports: built-in labels, or Y1..YN.
std::vector<std::string> parameter_labels(const ExperimentConfig& cfg, std::size_t dim);

}  // namespace lejapce
