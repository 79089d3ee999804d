#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "acc/rng.hpp"

namespace acc {

/// A point in the parameter space (length p, fixed per model).
using ParameterPoint = Eigen::VectorXd;

/// Observed or simulated summary statistic (length d >= p).
using SummaryVector = Eigen::VectorXd;

/// An ordered sequence of scalar observations.
struct Dataset {
  std::vector<double> observations;

  std::size_t size() const { return observations.size(); }
};

struct Particle {
  ParameterPoint theta;
  SummaryVector summary;
  double weight = 1.0;
};

/// Retained draws of an accept-reject or importance sampler.
struct ParticleSet {
  std::vector<Particle> particles;
  /// Proposals generated, accepted or not.
  std::size_t attempts = 0;
  /// Tolerance in force when the set was produced.
  double tolerance = 0.0;
  /// Set by regression_adjust.
  bool adjusted = false;

  std::size_t size() const { return particles.size(); }
  bool empty() const { return particles.empty(); }
  std::size_t parameter_dim() const;
  double acceptance_proportion() const;
  double total_weight() const;
  /// (sum w)^2 / sum w^2.
  double effective_sample_size() const;
  /// Values of coordinate j across particles, in particle order.
  std::vector<double> coordinate(std::size_t j) const;
  std::vector<double> weights() const;
};

/// Sum w_i theta_i / sum w_i. Throws DegenerateSampleError when the total
/// weight is zero.
ParameterPoint weighted_mean(const ParticleSet& particles);

/// Coordinatewise weighted variance sum w_i (theta_i - mean)^2 / sum w_i.
Eigen::VectorXd weighted_variance(const ParticleSet& particles);

/// Weighted covariance of the particle parameters (normalized by sum w).
Eigen::MatrixXd weighted_covariance(const ParticleSet& particles);

/// A generative model M_theta together with its summary statistic S_n.
///
/// Implementations are immutable: simulate() may be called concurrently as
/// long as each caller owns its RngStream.
class GenerativeModel {
 public:
  virtual ~GenerativeModel() = default;

  virtual std::string name() const = 0;
  virtual std::size_t parameter_dim() const = 0;
  virtual std::size_t summary_dim() const = 0;
  virtual std::size_t sample_size() const = 0;

  virtual bool in_domain(const ParameterPoint& theta) const = 0;
  virtual Dataset simulate(const ParameterPoint& theta, RngStream& rng) const = 0;
  virtual SummaryVector summarize(const Dataset& data) const = 0;

  /// A copy whose sample size matches `observed` and whose summaries are
  /// calibrated against it where the statistic needs a reference (Ricker).
  virtual std::unique_ptr<GenerativeModel> bind(const Dataset& observed) const = 0;

  /// False for models that must not be simulated from several threads.
  virtual bool concurrent_safe() const { return true; }
};

/// Axis-aligned box; truncation support for improper distributions.
struct Box {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

/// A sampling distribution over parameters with a (possibly unnormalized)
/// log density. Improper distributions are represented truncated to a box.
struct ProposalDistribution {
  std::size_t dim = 0;
  std::function<ParameterPoint(RngStream&)> sample;
  std::function<double(const ParameterPoint&)> log_density;
};

}  // namespace acc
