#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "selfnorm/coefficients.hpp"
#include "selfnorm/innovations.hpp"

namespace selfnorm {

enum class ExperimentKind { Clt, SelfNorm, Fdd, UnitRoot, Truncation };

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_from_name(std::string_view name);

/// Everything that determines an experiment's output. `workers` only
/// affects speed and is excluded from the reports.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Clt;
  InnovationModel model{InnovationKind::StandardGaussian};
  CoefficientScheme scheme = CoefficientScheme::power_law(0.75);
  std::vector<std::size_t> n_list{1024, 4096, 16384};
  std::size_t replicates = 2000;
  std::vector<double> times{0.25, 0.5, 0.75, 1.0};
  std::uint64_t seed = 1;
  /// KS or covariance-error threshold at the largest n.
  double tolerance = 0.05;
  /// Relative band for the median LLN statistic around A^2.
  double lln_tolerance = 0.10;
  /// Reference sample size as a multiple of `replicates`.
  std::size_t reference_multiple = 5;
  std::size_t fbm_grid = 1024;
  /// Burn-in override; the default policy is used when empty.
  std::optional<std::size_t> lag;
  std::size_t workers = 0;

  /// Throws ConfigError naming the first invalid field.
  void validate() const;
};

/// Threshold used when the caller sets none: `base` at the reference
/// replicate count, widened by sqrt(reference / R) for smaller runs.
double default_tolerance(ExperimentKind kind, std::size_t replicates);

/// Applies one key=value setting. Keys: experiment, model, scheme, kind,
/// d, alpha, L, n, replicates, seed, times, tolerance, lln_tolerance,
/// reference_multiple, fbm_grid, lag, workers. Throws ConfigError.
void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value);

nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const nlohmann::json& j);

struct Check {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool passed = false;

  friend bool operator==(const Check&, const Check&) = default;
};

/// Statistics for one path length n. Fields that an experiment does not
/// produce stay empty.
struct NResult {
  std::size_t n = 0;
  std::size_t lag = 0;
  std::size_t completed = 0;
  std::size_t failed = 0;
  double B_n = 0.0;
  double l_n = 0.0;
  std::optional<double> ks;              ///< clt / selfnorm marginal
  std::optional<double> second_moment;   ///< mean of the squared normalized statistic
  std::optional<double> lln_median;
  std::optional<double> lln_mean;
  std::optional<double> max_cov_error;
  std::vector<std::vector<double>> covariance;
  std::vector<std::vector<double>> kernel;
  std::optional<double> ks_a;
  std::optional<double> ks_b;
  std::optional<double> ks_c;
  std::optional<double> truncation_mean;
  std::optional<double> truncation_stderr;

  friend bool operator==(const NResult&, const NResult&) = default;
};

struct ConvergenceReport {
  static constexpr int kSchemaVersion = 1;
  int schema_version = kSchemaVersion;
  nlohmann::json config;
  std::string experiment;
  double a_sq = 0.0;
  double c_alpha = 0.0;
  double hurst = 0.0;
  /// Variance of the limit law the marginal statistic is compared with.
  double limit_variance = 0.0;
  double noise_floor = 0.0;
  std::vector<NResult> results;
  std::vector<Check> checks;
  bool passed = false;
  std::string note;

  friend bool operator==(const ConvergenceReport&, const ConvergenceReport&) = default;
};

nlohmann::json report_to_json(const ConvergenceReport& report);
ConvergenceReport report_from_json(const nlohmann::json& j);

/// Per-replicate raw statistics; failed replicates have status 1 and NaN
/// statistics.
struct RawTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct ExperimentOutput {
  ConvergenceReport report;
  RawTable raw;
};

ExperimentOutput run_clt_experiment(const ExperimentConfig& cfg);
ExperimentOutput run_selfnorm_experiment(const ExperimentConfig& cfg);
ExperimentOutput run_fdd_covariance_check(const ExperimentConfig& cfg);
ExperimentOutput run_unitroot_experiment(const ExperimentConfig& cfg);
ExperimentOutput run_truncation_experiment(const ExperimentConfig& cfg);
ExperimentOutput run_experiment(const ExperimentConfig& cfg);

/// "<experiment>_<model>_<scheme>_n<n1-n2>_R<R>_seed<seed>", filesystem safe.
std::string output_stem(const ExperimentConfig& cfg);

std::string format_raw_csv(const RawTable& raw);
/// Pretty JSON text with a trailing newline.
std::string format_report_json(const ConvergenceReport& report);

}  // namespace selfnorm
