#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "acc/models.hpp"

namespace acc {

struct ModelSpec {
  /// gaussian | cauchy | ricker
  std::string name = "cauchy";
  std::size_t n = 400;
  /// Data-generating parameter in the model's parameter coordinates.
  std::vector<double> theta0;
  /// Cauchy only.
  std::string unknown = "location";
  std::string summary = "median";
  double known_location = 10.0;
  double known_scale = 0.55;
  /// Ricker only.
  std::size_t burn_in = 50;
};

/// An initial distribution r_n or a prior.
///
/// kinds: flat, one_over_sigma, location_scale (flat x 1/sigma), normal,
/// student_t, minibatch, refined_minibatch, prior (r_n := the prior).
struct DistributionSpec {
  std::string kind = "flat";
  /// Improper boxes: data quartiles -/+ box_multiple IQR, MAD / or * scale_factor.
  double box_multiple = 10.0;
  double scale_factor = 50.0;
  /// Explicit half width around the summary-based estimate; overrides the
  /// quartile rule when positive.
  double box_half_width = 0.0;
  /// normal: N(mu, 1/b^2).
  double mu = 0.0;
  double b = 1.0;
  /// student_t.
  double df = 4.0;
  double location = 0.0;
  double scale = 1.0;
  /// minibatch / refined_minibatch.
  double nu = 0.5;
  std::size_t subset_size = 0;
  std::size_t batches = 0;
  /// auto | disjoint | overlapping
  std::string policy = "auto";
  std::size_t stride = 1;
  /// median | mad | median_mad | mean | msl
  std::string estimator = "median";
  /// Added to every crude subset estimate (bias experiments).
  std::vector<double> estimator_offset;
  std::size_t refine_particles = 1000;
  std::size_t refine_iterations = 5;
  double refine_initial_quantile = 0.5;
  double refine_final_quantile = 0.05;
};

struct MethodSpec {
  /// r-abc | r-acc | is-abc
  std::string algorithm = "r-acc";
  bool adjust = true;
  /// reflected | percentile | auto (reflected for rejection samplers,
  /// percentile for importance sampling)
  std::string interval = "auto";
};

struct SamplerSpec {
  std::string kernel = "gaussian";
  /// Proposals per run in acceptance-proportion mode and in fixed-epsilon
  /// mode without target_accepted.
  std::size_t n_proposals = 10000;
  /// Acceptance proportions; one result block each.
  std::vector<double> acceptance;
  /// Fixed tolerances; used when `acceptance` is empty.
  std::vector<double> epsilons;
  std::size_t target_accepted = 0;
  std::size_t max_attempts = 0;
};

struct ExperimentConfig {
  std::string setting = "custom";
  ModelSpec model;
  DistributionSpec initial;
  DistributionSpec prior;
  std::vector<MethodSpec> methods;
  SamplerSpec sampler;
  std::vector<double> alphas{0.05};
  /// intervals | depth | auto (depth when p > 1 and the model is Cauchy)
  std::string region = "auto";
  std::size_t replications = 200;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  /// Gaussian model: report the closed-form accepted moments.
  bool oracle = false;
  SyntheticLikelihoodConfig synthetic;
  std::string output;

  /// Throws ValidationError; called before any simulation.
  void validate() const;
};

/// Parses the JSON configuration. With paper_scale the object under
/// "paper_scale" is merge-patched over the document first.
ExperimentConfig parse_config(const std::string& json_text, bool paper_scale = false);
ExperimentConfig load_config(const std::string& path, bool paper_scale = false);

/// Canonical JSON form of a configuration (used for CSV provenance).
std::string config_to_json(const ExperimentConfig& config);

}  // namespace acc
