#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "acc/types.hpp"

namespace acc {

/// Which end `[m alpha]` counts from. from_smallest is the default: it makes
/// 2 theta_hat - theta_(alpha) an upper 1 - alpha bound.
enum class QuantileRank { from_smallest, from_largest };

/// Order statistic of rank ceil(m alpha) (from_smallest) or the value of the
/// same rank counted from the largest. Throws InvalidArgument on empty input
/// or alpha outside (0, 1).
double empirical_quantile(std::span<const double> values, double alpha,
                          QuantileRank rank = QuantileRank::from_smallest);

/// Right-continuous step CDF over weighted points.
class EmpiricalCD {
 public:
  EmpiricalCD(std::vector<double> values, std::vector<double> weights);

  double operator()(double t) const;
  /// Smallest support point with cumulative value >= p.
  double quantile(double p) const;
  double median() const { return quantile(0.5); }

  const std::vector<double>& points() const { return points_; }
  const std::vector<double>& cumulative() const { return cumulative_; }
  std::size_t size() const { return points_.size(); }

 private:
  std::vector<double> points_;
  std::vector<double> cumulative_;
};

/// H_n(t) = pr*(2 theta_hat_obs - theta_ACC <= t), weights honored.
/// Throws InvalidArgument for a parameter dimension other than 1.
EmpiricalCD cd_from_particles(const ParticleSet& particles, double theta_hat_obs);

/// Paired maps V (Monte Carlo side) and W (sampling side) into R^k.
struct MatchingMaps {
  using Map = std::function<Eigen::VectorXd(const ParameterPoint&, const SummaryVector&)>;
  Map v;
  Map w;

  /// V = theta - theta_hat(s), W = theta_hat(s) - theta.
  static MatchingMaps location(std::function<ParameterPoint(const SummaryVector&)> estimator);
  /// V = W = theta / theta_hat(s) (positive parameters).
  static MatchingMaps scale(std::function<ParameterPoint(const SummaryVector&)> estimator);
  /// V = W = theta - theta_hat(s).
  static MatchingMaps centered(std::function<ParameterPoint(const SummaryVector&)> estimator);
};

enum class Sidedness { two_sided_central, upper };

/// Weighted Mahalanobis depth reference built from points v_1..v_m.
class DepthReference {
 public:
  /// Throws InvalidArgument on a singular covariance unless allow_ridge.
  DepthReference(const std::vector<Eigen::VectorXd>& points, const std::vector<double>& weights,
                 bool allow_ridge = false);

  double depth(const Eigen::VectorXd& x) const;
  double squared_distance(const Eigen::VectorXd& x) const;

  const Eigen::VectorXd& center() const { return center_; }
  const Eigen::MatrixXd& covariance() const { return covariance_; }
  const std::vector<double>& sorted_depths() const { return sorted_depths_; }
  const std::vector<double>& sorted_weights() const { return sorted_weights_; }
  std::size_t size() const { return sorted_depths_.size(); }
  bool ridge_applied() const { return ridge_applied_; }
  /// FNV-1a digest of the reference points, for audit records.
  std::uint64_t digest() const { return digest_; }

 private:
  Eigen::VectorXd center_;
  Eigen::MatrixXd covariance_;
  Eigen::LLT<Eigen::MatrixXd> factor_;
  std::vector<double> sorted_depths_;
  std::vector<double> sorted_weights_;
  bool ridge_applied_ = false;
  std::uint64_t digest_ = 0;
};

/// 1 / (1 + (x - mu)' Sigma^-1 (x - mu)) for the weighted reference.
double mahalanobis_depth(const Eigen::VectorXd& point, const std::vector<Eigen::VectorXd>& reference,
                         const std::vector<double>& weights, bool allow_ridge = false);

enum class RegionKind { interval, one_sided, depth_contour };

std::string to_string(RegionKind kind);

/// A confidence region of nominal level 1 - alpha.
class ConfidenceRegion {
 public:
  static ConfidenceRegion interval(double lo, double hi, double level);
  /// Half-line; one of lo / hi is infinite.
  static ConfidenceRegion one_sided(double lo, double hi, double level);
  /// theta is inside iff the weighted fraction of reference depths strictly
  /// below depth(W(theta)) is at least alpha.
  static ConfidenceRegion depth_contour(std::shared_ptr<const DepthReference> reference,
                                        std::function<Eigen::VectorXd(const ParameterPoint&)> w,
                                        double level, Box bounding_box);

  RegionKind kind() const { return kind_; }
  double level() const { return level_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  /// Depth a point must exceed to be inside (depth contours only).
  double depth_threshold() const { return threshold_; }
  const DepthReference* reference() const { return reference_.get(); }

  bool contains(const ParameterPoint& theta) const;
  bool contains(double theta) const;

  /// Interval width, or volume of a depth contour in parameter space.
  double size() const { return size_; }
  void set_size(double size) { size_ = size; }

  /// Monte Carlo volume: uniform draws over the bounding box.
  double estimate_volume(std::size_t draws, std::uint64_t seed) const;
  /// Exact volume of the contour in W-space (an ellipsoid).
  double w_space_volume() const;

  /// One-line plain-text record: kind, level, endpoints or threshold + digest.
  std::string to_record() const;

 private:
  RegionKind kind_ = RegionKind::interval;
  double level_ = 0.95;
  double lo_ = 0.0;
  double hi_ = 0.0;
  double threshold_ = 0.0;
  double size_ = 0.0;
  std::shared_ptr<const DepthReference> reference_;
  std::function<Eigen::VectorXd(const ParameterPoint&)> w_;
  Eigen::VectorXd box_lower_;
  Eigen::VectorXd box_upper_;
};

/// Inverts W(., s_obs) by bisection between the central (or upper)
/// quantiles of v_i = V(theta_i, s_obs). Scalar parameters only.
/// Throws NonMonotoneMapError when W is not monotone over the bracket.
ConfidenceRegion interval_from_w(const ParticleSet& particles, const MatchingMaps& maps,
                                 const SummaryVector& s_obs, double alpha, Sidedness sided,
                                 QuantileRank rank = QuantileRank::from_smallest);

struct DepthRegionOptions {
  bool allow_ridge = true;
  /// Monte Carlo draws for the region volume (0 skips the estimate).
  std::size_t volume_draws = 20000;
  std::uint64_t volume_seed = 0;
};

ConfidenceRegion depth_region(const ParticleSet& particles, const MatchingMaps& maps,
                              const SummaryVector& s_obs, double alpha,
                              const DepthRegionOptions& options = {});

struct CoverageScore {
  double coverage = 0.0;
  double median_size = 0.0;
  std::size_t count = 0;
};

/// Throws InvalidArgument for an empty batch or mixed region kinds.
CoverageScore coverage_score(const std::vector<ConfidenceRegion>& regions,
                             const ParameterPoint& theta0);

/// Posterior prod 1 / (1 + ((x_i - theta)/tau)^2) under a flat prior,
/// evaluated on `grid` and normalized by the trapezoid rule.
std::vector<double> cauchy_target_posterior_grid(const Dataset& data, double tau,
                                                 const std::vector<double>& grid);

/// sup |F_sample - F_grid| where F_grid integrates a gridded density by the
/// trapezoid rule.
double ks_distance_to_grid(std::vector<double> sample, const std::vector<double>& grid,
                           const std::vector<double>& density);

}  // namespace acc
