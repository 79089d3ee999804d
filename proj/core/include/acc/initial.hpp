#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "acc/kernels.hpp"
#include "acc/samplers.hpp"
#include "acc/types.hpp"

namespace acc {

/// Product-Gaussian kernel density estimate over point estimates.
class KdeEstimate {
 public:
  KdeEstimate(std::vector<ParameterPoint> centers, Eigen::VectorXd bandwidth);

  const std::vector<ParameterPoint>& centers() const { return *centers_; }
  const Eigen::VectorXd& bandwidth() const { return bandwidth_; }
  std::size_t dim() const { return static_cast<std::size_t>(bandwidth_.size()); }
  std::size_t size() const { return centers_->size(); }

  double density(const ParameterPoint& theta) const;
  double log_density(const ParameterPoint& theta) const;
  ParameterPoint sample(RngStream& rng) const;

  /// Mean and coordinatewise standard deviation of the mixture.
  ParameterPoint mean() const;
  Eigen::VectorXd standard_deviation() const;

  ProposalDistribution as_proposal() const;

 private:
  std::shared_ptr<const std::vector<ParameterPoint>> centers_;
  Eigen::VectorXd bandwidth_;
  double log_norm_ = 0.0;
};

/// Silverman's rule per coordinate,
/// h_j = 0.9 min(sd_j, IQR_j / 1.34) k^(-1/5), floored at 1e-8 (1 + |median_j|).
/// IQR uses the ceil(k alpha) order-statistic quantile.
Eigen::VectorXd kde_bandwidth(const std::vector<ParameterPoint>& centers);

enum class OverlapPolicy { disjoint, overlapping };

OverlapPolicy parse_overlap_policy(const std::string& name);

/// Point estimate computed on one data subset. The stream is owned by the
/// call and may be used by simulation-based estimators.
using PointEstimator = std::function<ParameterPoint(const Dataset&, RngStream&)>;

struct MinibatchConfig {
  /// Subset size floor(n^nu) unless subset_size is set.
  double nu = 0.5;
  std::size_t subset_size = 0;
  /// Number of subsets; 0 means floor(n / size) for disjoint and
  /// as many windows as fit for overlapping.
  std::size_t batches = 0;
  OverlapPolicy policy = OverlapPolicy::disjoint;
  std::size_t stride = 1;
  PointEstimator estimator;
  unsigned workers = 1;
};

/// Disjoint subsets partition a random permutation of the observations;
/// overlapping subsets are contiguous windows advanced by `stride`.
std::vector<Dataset> minibatch_subsets(const Dataset& data, const MinibatchConfig& config,
                                       std::uint64_t seed);

/// Subset point estimates (one per subset, in subset order).
std::vector<ParameterPoint> minibatch_estimates(const std::vector<Dataset>& subsets,
                                                const MinibatchConfig& config, std::uint64_t seed);

KdeEstimate minibatch_rn(const Dataset& data, const MinibatchConfig& config, std::uint64_t seed);

struct RefineConfig {
  std::size_t particles = 1000;
  std::size_t iterations = 5;
  /// The epsilon schedule is geometric between these quantiles of the
  /// standardized distances of a pilot drawn from the crude r_n.
  double initial_quantile = 0.5;
  double final_quantile = 0.05;
  KernelFamily kernel = KernelFamily::gaussian;
  /// Prior the subset means are taken under; flat in theta when log_density
  /// is empty.
  ProposalDistribution target;
  unsigned workers = 1;
};

struct RefinedMinibatch {
  KdeEstimate kde;
  std::vector<ParameterPoint> crude_centers;
  std::vector<ParameterPoint> refined_centers;
  std::vector<std::string> warnings;
};

/// Builds the crude minibatch r_n, then replaces each subset estimate by a
/// population Monte Carlo approximation of E{theta | S(z_i)} under
/// refine.target, proposing from the crude r_n in the first iteration. Subsets whose
/// PMC run degenerates keep their crude estimate.
RefinedMinibatch refined_minibatch_rn(const Dataset& data, const MinibatchConfig& config,
                                      const GenerativeModel& model, const RefineConfig& refine,
                                      std::uint64_t seed);

/// r(theta) proportional to 1 on [lower, upper].
ProposalDistribution improper_location(double lower, double upper);

/// r(sigma) proportional to 1/sigma on [lower, upper], 0 < lower.
ProposalDistribution improper_scale(double lower, double upper);

enum class BoxCoordinate { flat, reciprocal };

/// Product of flat / 1-over-x coordinates on a box.
ProposalDistribution improper_box(const Box& box, const std::vector<BoxCoordinate>& kinds);

/// [Q1 - m IQR, Q3 + m IQR] of the data (m = 10 by default).
std::pair<double, double> location_box(const Dataset& data, double iqr_multiple = 10.0);

/// [MAD / f, f MAD] of the data (f = 50 by default).
std::pair<double, double> scale_box(const Dataset& data, double factor = 50.0);

/// N(mu, 1/b^2); b must be positive.
ProposalDistribution normal_proposal(double mu, double inverse_sd);

/// Student t with `df` degrees of freedom, location and scale.
ProposalDistribution student_t_proposal(double df, double location, double scale);

}  // namespace acc
