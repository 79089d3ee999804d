#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "acc/config.hpp"
#include "acc/inference.hpp"
#include "acc/models.hpp"
#include "acc/types.hpp"

namespace acc {

std::unique_ptr<GenerativeModel> make_model(const ModelSpec& spec);
std::vector<std::string> parameter_names(const ModelSpec& spec);

/// One (method, tolerance) result on one dataset.
struct MethodRun {
  std::string algorithm;
  bool adjusted = false;
  /// Target acceptance proportion (NaN in fixed-epsilon mode).
  double acceptance_target = 0.0;
  double epsilon = 0.0;
  ParticleSet particles;
  Eigen::VectorXd unadjusted_variance;
  Eigen::VectorXd adjusted_variance;
  /// regions[a][j]: alpha index a, parameter coordinate j (one entry for a
  /// joint depth region).
  std::vector<std::vector<ConfidenceRegion>> regions;
  /// Gaussian oracle comparison (NaN unless requested).
  double oracle_mean = 0.0;
  double oracle_variance = 0.0;
  double sample_mean = 0.0;
  double sample_variance = 0.0;
};

struct SingleRunResult {
  SummaryVector s_obs;
  std::vector<MethodRun> runs;
  std::vector<std::string> warnings;
};

/// Builds r_n (and the prior), samples with every configured method, adjusts
/// when asked and forms regions at every alpha. Errors are rethrown prefixed
/// with the failing stage.
SingleRunResult run_single(const ExperimentConfig& config, const Dataset& data,
                           std::uint64_t seed);

/// Observed dataset `index` of a replication study.
Dataset replicate_dataset(const ExperimentConfig& config, std::size_t index);

struct ResultRow {
  std::string setting;
  std::string method;
  bool adjusted = false;
  std::string parameter;
  double acceptance = 0.0;
  double epsilon = 0.0;
  double level = 0.95;
  double coverage = 0.0;
  double median_size = 0.0;
  std::size_t replications = 0;
  std::size_t failures = 0;
  std::size_t attempts = 0;
  std::size_t accepted = 0;
  double wall_seconds = 0.0;
};

struct CoverageReport {
  std::vector<ResultRow> rows;
  std::size_t failures = 0;
  std::vector<std::string> failure_messages;
  /// Coordinatewise comparisons of adjusted vs unadjusted variance.
  std::size_t variance_checks = 0;
  std::size_t variance_violations = 0;
  /// Total proposals over all datasets and methods.
  std::size_t total_attempts = 0;
  double wall_seconds = 0.0;
  /// More than 5% of datasets failed.
  bool failed = false;
};

/// Simulates `replications` datasets at theta0, runs run_single on each
/// (parallel over datasets) and aggregates coverage per
/// (method, tolerance, parameter, level).
CoverageReport run_coverage(const ExperimentConfig& config);

/// Header + rows; numbers with 6 significant digits. Wall time is not part of
/// the CSV so that reruns are byte-identical.
void write_result_csv(std::ostream& out, const std::vector<ResultRow>& rows);
void write_timing_csv(std::ostream& out, const std::vector<ResultRow>& rows);

/// Per-region records of a single run (the `run` subcommand output).
void write_run_csv(std::ostream& out, const ExperimentConfig& config, const SingleRunResult& result);

std::string format_number(double value);

struct Figure1Config {
  std::size_t n = 5000;
  std::vector<double> epsilons{0.1, 0.01, 0.001};
  std::uint64_t seed = 1;
  double theta0 = 10.0;
  double tau = 0.55;
  std::size_t grid_points = 1001;
  std::size_t particles = 500;
  /// Flat prior half width around the sample median; 0 means 25 tau sqrt(2/n).
  double box_half_width = 0.0;
  unsigned workers = 1;
};

struct Figure1Series {
  double epsilon = 0.0;
  std::vector<double> mean_particles;
  std::vector<double> median_particles;
  std::vector<double> mean_kde;
  std::vector<double> median_kde;
  std::size_t mean_attempts = 0;
  std::size_t median_attempts = 0;
};

struct Figure1Data {
  Dataset data;
  std::vector<double> grid;
  std::vector<double> target;
  std::vector<Figure1Series> series;
};

Figure1Data emit_figure1_data(const Figure1Config& config);

/// Columns: epsilon, theta, target, abc_mean_kde, abc_median_kde.
void write_figure1_csv(std::ostream& out, const Figure1Data& data);

struct OracleCase {
  std::size_t n = 100;
  double epsilon = 0.1;
  double mu_n = 0.0;
  double b_n = 0.0;
};

struct OracleRow {
  OracleCase setting;
  double s_obs = 0.0;
  double closed_mean = 0.0;
  double closed_variance = 0.0;
  double sample_mean = 0.0;
  double sample_variance = 0.0;
  std::size_t accepted = 0;
  std::size_t attempts = 0;
  /// |difference| / Monte Carlo standard error.
  double mean_z = 0.0;
  double variance_z = 0.0;
};

struct OracleCheckConfig {
  std::vector<OracleCase> cases;
  std::size_t accepted = 5000;
  double theta0 = 0.8;
  std::uint64_t seed = 1;
  unsigned workers = 1;
};

/// The full (eps x mu_n x b_n) grid at n = 100.
OracleCheckConfig default_oracle_check();

std::vector<OracleRow> oracle_check(const OracleCheckConfig& config);
void write_oracle_csv(std::ostream& out, const std::vector<OracleRow>& rows);

}  // namespace acc
