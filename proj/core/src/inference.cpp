#include "acc/inference.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <numbers>
#include <numeric>

#include "acc/errors.hpp"
#include "acc/stats.hpp"

namespace acc {

double empirical_quantile(std::span<const double> values, double alpha, QuantileRank rank) {
  if (values.empty()) throw InvalidArgument("quantile of an empty sequence");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t m = sorted.size();
  auto r = static_cast<std::size_t>(std::ceil(static_cast<double>(m) * alpha - 1e-12));
  r = std::clamp<std::size_t>(r, 1, m);
  return rank == QuantileRank::from_smallest ? sorted[r - 1] : sorted[m - r];
}

namespace {

double ranked_weighted_quantile(std::span<const double> values, std::span<const double> weights,
                                double alpha, QuantileRank rank) {
  if (rank == QuantileRank::from_smallest) return stats::weighted_quantile(values, weights, alpha);
  std::vector<double> negated(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) negated[i] = -values[i];
  return -stats::weighted_quantile(negated, weights, alpha);
}

}  // namespace

EmpiricalCD::EmpiricalCD(std::vector<double> values, std::vector<double> weights) {
  if (values.empty()) throw InvalidArgument("confidence distribution of an empty sample");
  if (weights.empty()) weights.assign(values.size(), 1.0);
  if (weights.size() != values.size()) throw InvalidArgument("value and weight counts differ");
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidArgument("weights must be finite and non-negative");
    total += w;
  }
  if (!(total > 0.0)) throw DegenerateSampleError("total weight is zero");
  double running = 0.0;
  for (std::size_t i : order) {
    if (weights[i] == 0.0) continue;
    running += weights[i];
    if (!points_.empty() && points_.back() == values[i]) {
      cumulative_.back() = running / total;
    } else {
      points_.push_back(values[i]);
      cumulative_.push_back(running / total);
    }
  }
  cumulative_.back() = 1.0;
}

double EmpiricalCD::operator()(double t) const {
  const auto it = std::upper_bound(points_.begin(), points_.end(), t);
  if (it == points_.begin()) return 0.0;
  return cumulative_[static_cast<std::size_t>(it - points_.begin()) - 1];
}

double EmpiricalCD::quantile(double p) const {
  if (!(p > 0.0 && p <= 1.0)) throw InvalidArgument("probability must lie in (0, 1]");
  const double target = p * (1.0 - 1e-12);
  const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), target);
  if (it == cumulative_.end()) return points_.back();
  return points_[static_cast<std::size_t>(it - cumulative_.begin())];
}

EmpiricalCD cd_from_particles(const ParticleSet& particles, double theta_hat_obs) {
  if (particles.empty()) throw InvalidArgument("confidence distribution of an empty particle set");
  if (particles.parameter_dim() != 1) {
    throw InvalidArgument("confidence distributions need a scalar parameter");
  }
  std::vector<double> reflected;
  reflected.reserve(particles.size());
  for (const auto& p : particles.particles) reflected.push_back(2.0 * theta_hat_obs - p.theta[0]);
  return EmpiricalCD(std::move(reflected), particles.weights());
}

MatchingMaps MatchingMaps::location(std::function<ParameterPoint(const SummaryVector&)> estimator) {
  MatchingMaps maps;
  maps.v = [estimator](const ParameterPoint& theta, const SummaryVector& s) {
    return Eigen::VectorXd(theta - estimator(s));
  };
  maps.w = [estimator](const ParameterPoint& theta, const SummaryVector& s) {
    return Eigen::VectorXd(estimator(s) - theta);
  };
  return maps;
}

MatchingMaps MatchingMaps::scale(std::function<ParameterPoint(const SummaryVector&)> estimator) {
  MatchingMaps maps;
  maps.v = [estimator](const ParameterPoint& theta, const SummaryVector& s) {
    return Eigen::VectorXd(theta.array() / estimator(s).array());
  };
  maps.w = maps.v;
  return maps;
}

MatchingMaps MatchingMaps::centered(std::function<ParameterPoint(const SummaryVector&)> estimator) {
  MatchingMaps maps;
  maps.v = [estimator](const ParameterPoint& theta, const SummaryVector& s) {
    return Eigen::VectorXd(theta - estimator(s));
  };
  maps.w = maps.v;
  return maps;
}

DepthReference::DepthReference(const std::vector<Eigen::VectorXd>& points,
                               const std::vector<double>& weights, bool allow_ridge) {
  if (points.empty()) throw InvalidArgument("depth reference is empty");
  const Eigen::Index k = points.front().size();
  std::vector<double> w = weights.empty() ? std::vector<double>(points.size(), 1.0) : weights;
  if (w.size() != points.size()) throw InvalidArgument("point and weight counts differ");
  double total = 0.0;
  for (double x : w) total += x;
  if (!(total > 0.0)) throw DegenerateSampleError("depth reference has zero total weight");

  center_ = Eigen::VectorXd::Zero(k);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != k) throw InvalidArgument("depth reference dimension mismatch");
    center_ += (w[i] / total) * points[i];
  }
  covariance_ = Eigen::MatrixXd::Zero(k, k);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Eigen::VectorXd d = points[i] - center_;
    covariance_.noalias() += (w[i] / total) * d * d.transpose();
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(covariance_);
  const double top = eig.eigenvalues().maxCoeff();
  const double bottom = eig.eigenvalues().minCoeff();
  if (!(top > 0.0) || !(bottom > 1e-10 * top)) {
    if (!allow_ridge) throw InvalidArgument("depth reference covariance is singular");
    const double ridge = 1e-8 * std::max(covariance_.trace(), 1e-300) / static_cast<double>(k);
    covariance_.diagonal().array() += ridge;
    ridge_applied_ = true;
  }
  factor_.compute(covariance_);
  if (factor_.info() != Eigen::Success) throw InvalidArgument("depth reference covariance is singular");

  std::vector<std::pair<double, double>> ranked(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) ranked[i] = {depth(points[i]), w[i] / total};
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  sorted_depths_.reserve(ranked.size());
  sorted_weights_.reserve(ranked.size());
  for (const auto& [d, wt] : ranked) {
    sorted_depths_.push_back(d);
    sorted_weights_.push_back(wt);
  }

  std::uint64_t h = 1469598103934665603ULL;
  for (const auto& p : points) {
    for (Eigen::Index j = 0; j < k; ++j) {
      const double x = p[j];
      unsigned char bytes[sizeof(double)];
      std::memcpy(bytes, &x, sizeof(double));
      for (unsigned char b : bytes) {
        h ^= b;
        h *= 1099511628211ULL;
      }
    }
  }
  digest_ = h;
}

double DepthReference::squared_distance(const Eigen::VectorXd& x) const {
  if (x.size() != center_.size()) throw InvalidArgument("depth point dimension mismatch");
  const Eigen::VectorXd z = factor_.matrixL().solve(x - center_);
  return z.squaredNorm();
}

double DepthReference::depth(const Eigen::VectorXd& x) const {
  const double d2 = squared_distance(x);
  return std::isfinite(d2) ? 1.0 / (1.0 + d2) : 0.0;
}

double mahalanobis_depth(const Eigen::VectorXd& point, const std::vector<Eigen::VectorXd>& reference,
                         const std::vector<double>& weights, bool allow_ridge) {
  return DepthReference(reference, weights, allow_ridge).depth(point);
}

std::string to_string(RegionKind kind) {
  switch (kind) {
    case RegionKind::interval: return "interval";
    case RegionKind::one_sided: return "one_sided";
    case RegionKind::depth_contour: return "depth_contour";
  }
  return "unknown";
}

namespace {

void check_level(double level) {
  if (!(level > 0.0 && level < 1.0)) throw InvalidArgument("level must lie in (0, 1)");
}

}  // namespace

ConfidenceRegion ConfidenceRegion::interval(double lo, double hi, double level) {
  check_level(level);
  if (!(lo <= hi)) throw InvalidArgument("interval bounds out of order");
  ConfidenceRegion r;
  r.kind_ = RegionKind::interval;
  r.level_ = level;
  r.lo_ = lo;
  r.hi_ = hi;
  r.size_ = hi - lo;
  return r;
}

ConfidenceRegion ConfidenceRegion::one_sided(double lo, double hi, double level) {
  check_level(level);
  if (!(lo <= hi)) throw InvalidArgument("interval bounds out of order");
  if (std::isfinite(lo) && std::isfinite(hi)) {
    throw InvalidArgument("a one-sided region needs an infinite end");
  }
  ConfidenceRegion r;
  r.kind_ = RegionKind::one_sided;
  r.level_ = level;
  r.lo_ = lo;
  r.hi_ = hi;
  r.size_ = std::numeric_limits<double>::infinity();
  return r;
}

ConfidenceRegion ConfidenceRegion::depth_contour(
    std::shared_ptr<const DepthReference> reference,
    std::function<Eigen::VectorXd(const ParameterPoint&)> w, double level, Box bounding_box) {
  check_level(level);
  if (!reference) throw InvalidArgument("depth contour needs a reference");
  if (bounding_box.lower.size() != bounding_box.upper.size()) {
    throw InvalidArgument("bounding box dimension mismatch");
  }
  const double alpha = 1.0 - level;
  ConfidenceRegion r;
  r.kind_ = RegionKind::depth_contour;
  r.level_ = level;
  const auto& depths = reference->sorted_depths();
  const auto& weights = reference->sorted_weights();
  double running = 0.0;
  r.threshold_ = depths.back();
  for (std::size_t i = 0; i < depths.size(); ++i) {
    running += weights[i];
    if (running >= alpha * (1.0 - 1e-12)) {
      r.threshold_ = depths[i];
      break;
    }
  }
  r.reference_ = std::move(reference);
  r.w_ = std::move(w);
  r.box_lower_ = bounding_box.lower;
  r.box_upper_ = bounding_box.upper;
  r.size_ = r.w_space_volume();
  return r;
}

bool ConfidenceRegion::contains(const ParameterPoint& theta) const {
  if (kind_ == RegionKind::depth_contour) {
    return reference_->depth(w_(theta)) > threshold_;
  }
  if (theta.size() != 1) throw InvalidArgument("interval regions hold scalars");
  return contains(theta[0]);
}

bool ConfidenceRegion::contains(double theta) const {
  if (kind_ == RegionKind::depth_contour) return contains(ParameterPoint::Constant(1, theta));
  return lo_ <= theta && theta <= hi_;
}

double ConfidenceRegion::estimate_volume(std::size_t draws, std::uint64_t seed) const {
  if (kind_ != RegionKind::depth_contour) return size_;
  if (draws == 0) throw InvalidArgument("volume estimate needs draws");
  const Eigen::VectorXd width = box_upper_ - box_lower_;
  if (!(width.minCoeff() > 0.0)) throw InvalidArgument("bounding box is empty");
  std::size_t inside = 0;
  ParameterPoint theta(width.size());
  for (std::size_t i = 0; i < draws; ++i) {
    RngStream rng = substream(seed, i);
    for (Eigen::Index j = 0; j < theta.size(); ++j) theta[j] = box_lower_[j] + rng.uniform() * width[j];
    if (contains(theta)) ++inside;
  }
  return width.prod() * static_cast<double>(inside) / static_cast<double>(draws);
}

double ConfidenceRegion::w_space_volume() const {
  if (kind_ != RegionKind::depth_contour) return size_;
  if (!(threshold_ > 0.0)) return std::numeric_limits<double>::infinity();
  const double k = static_cast<double>(reference_->center().size());
  const double r2 = std::max(1.0 / threshold_ - 1.0, 0.0);
  const double unit_ball = std::pow(std::numbers::pi, 0.5 * k) / std::tgamma(0.5 * k + 1.0);
  const double det = reference_->covariance().determinant();
  return unit_ball * std::pow(r2, 0.5 * k) * std::sqrt(det);
}

std::string ConfidenceRegion::to_record() const {
  char buf[256];
  if (kind_ == RegionKind::depth_contour) {
    std::snprintf(buf, sizeof buf, "depth_contour level=%.6g threshold=%.6g reference=%016llx",
                  level_, threshold_, static_cast<unsigned long long>(reference_->digest()));
  } else {
    std::snprintf(buf, sizeof buf, "%s level=%.6g lo=%.6g hi=%.6g", to_string(kind_).c_str(), level_,
                  lo_, hi_);
  }
  return buf;
}

namespace {

struct Bracket {
  double lo;
  double hi;
};

double w_scalar(const MatchingMaps& maps, double theta, const SummaryVector& s_obs) {
  const Eigen::VectorXd w = maps.w(ParameterPoint::Constant(1, theta), s_obs);
  if (w.size() != 1) throw InvalidArgument("W must be scalar for interval inversion");
  return w[0];
}

// theta with W(theta) = target on a monotone W; +-inf when the target lies
// beyond what the expanded bracket reaches
double invert(const MatchingMaps& maps, const SummaryVector& s_obs, double target, Bracket b,
              bool increasing, bool positive) {
  double w_lo = w_scalar(maps, b.lo, s_obs);
  double w_hi = w_scalar(maps, b.hi, s_obs);
  auto below = [&](double w) { return increasing ? w < target : w > target; };
  for (int expand = 0; expand < 60 && !below(w_lo); ++expand) {
    const double width = b.hi - b.lo;
    b.lo -= width;
    w_lo = w_scalar(maps, b.lo, s_obs);
    if (!std::isfinite(w_lo)) break;
  }
  if (!below(w_lo) || !std::isfinite(w_lo)) {
    if (w_lo == target) return b.lo;
    return positive && !std::isfinite(w_lo) ? 0.0 : -std::numeric_limits<double>::infinity();
  }
  for (int expand = 0; expand < 60 && below(w_hi); ++expand) {
    b.hi += (b.hi - b.lo);
    w_hi = w_scalar(maps, b.hi, s_obs);
    if (!std::isfinite(w_hi)) break;
  }
  if (below(w_hi) || !std::isfinite(w_hi)) return std::numeric_limits<double>::infinity();
  double lo = b.lo;
  double hi = b.hi;
  for (int it = 0; it < 300; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (below(w_scalar(maps, mid, s_obs))) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-10 * std::max(1.0, std::abs(mid))) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

ConfidenceRegion interval_from_w(const ParticleSet& particles, const MatchingMaps& maps,
                                 const SummaryVector& s_obs, double alpha, Sidedness sided,
                                 QuantileRank rank) {
  if (particles.empty()) throw InvalidArgument("interval from an empty particle set");
  if (particles.parameter_dim() != 1) throw InvalidArgument("interval inversion needs a scalar parameter");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");

  std::vector<double> v(particles.size());
  std::vector<double> thetas(particles.size());
  for (std::size_t i = 0; i < particles.size(); ++i) {
    const Eigen::VectorXd vi = maps.v(particles.particles[i].theta, s_obs);
    if (vi.size() != 1) throw InvalidArgument("V must be scalar for interval inversion");
    v[i] = vi[0];
    thetas[i] = particles.particles[i].theta[0];
  }
  const std::vector<double> w = particles.weights();

  const auto [tmin, tmax] = std::minmax_element(thetas.begin(), thetas.end());
  const double range = std::max(*tmax - *tmin, 1e-12 * std::max(1.0, std::abs(*tmin)));
  const bool positive = *tmin > 0.0;
  Bracket bracket{*tmin - 0.5 * range, *tmax + 0.5 * range};
  if (positive) bracket.lo = std::max(bracket.lo, 0.5 * *tmin);

  constexpr int kGrid = 65;
  std::vector<double> grid_w(kGrid);
  for (int g = 0; g < kGrid; ++g) {
    const double t = bracket.lo + (bracket.hi - bracket.lo) * g / (kGrid - 1);
    grid_w[static_cast<std::size_t>(g)] = w_scalar(maps, t, s_obs);
    if (!std::isfinite(grid_w[static_cast<std::size_t>(g)])) {
      throw NonMonotoneMapError("W is not finite over the search range; use a depth region");
    }
  }
  bool up = true;
  bool down = true;
  for (int g = 1; g < kGrid; ++g) {
    const double d = grid_w[static_cast<std::size_t>(g)] - grid_w[static_cast<std::size_t>(g - 1)];
    up = up && d > 0.0;
    down = down && d < 0.0;
  }
  if (!up && !down) throw NonMonotoneMapError("W is not monotone over the search range; use a depth region");

  const double level = 1.0 - alpha;
  if (sided == Sidedness::two_sided_central) {
    const double q_lo = ranked_weighted_quantile(v, w, 0.5 * alpha, rank);
    const double q_hi = ranked_weighted_quantile(v, w, 1.0 - 0.5 * alpha, rank);
    double a = invert(maps, s_obs, q_lo, bracket, up, positive);
    double b = invert(maps, s_obs, q_hi, bracket, up, positive);
    if (a > b) std::swap(a, b);
    return ConfidenceRegion::interval(a, b, level);
  }
  const double q = ranked_weighted_quantile(v, w, alpha, rank);
  const double edge = invert(maps, s_obs, q, bracket, up, positive);
  // {W >= q}: an upper bound on theta when W decreases, a lower bound otherwise
  if (up) return ConfidenceRegion::one_sided(edge, std::numeric_limits<double>::infinity(), level);
  return ConfidenceRegion::one_sided(-std::numeric_limits<double>::infinity(), edge, level);
}

ConfidenceRegion depth_region(const ParticleSet& particles, const MatchingMaps& maps,
                              const SummaryVector& s_obs, double alpha,
                              const DepthRegionOptions& options) {
  if (particles.empty()) throw InvalidArgument("depth region from an empty particle set");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
  std::vector<Eigen::VectorXd> v;
  v.reserve(particles.size());
  for (const auto& p : particles.particles) v.push_back(maps.v(p.theta, s_obs));
  auto reference = std::make_shared<const DepthReference>(v, particles.weights(), options.allow_ridge);

  const auto p = static_cast<Eigen::Index>(particles.parameter_dim());
  Box box{Eigen::VectorXd::Constant(p, std::numeric_limits<double>::infinity()),
          Eigen::VectorXd::Constant(p, -std::numeric_limits<double>::infinity())};
  for (const auto& q : particles.particles) {
    box.lower = box.lower.cwiseMin(q.theta);
    box.upper = box.upper.cwiseMax(q.theta);
  }
  const Eigen::VectorXd width = (box.upper - box.lower).cwiseMax(1e-12);
  box.lower -= width;
  box.upper += width;

  const MatchingMaps::Map w_map = maps.w;
  const SummaryVector s = s_obs;
  ConfidenceRegion region = ConfidenceRegion::depth_contour(
      reference, [w_map, s](const ParameterPoint& theta) { return w_map(theta, s); }, 1.0 - alpha, box);
  if (options.volume_draws > 0) {
    region.set_size(region.estimate_volume(options.volume_draws, options.volume_seed));
  }
  return region;
}

CoverageScore coverage_score(const std::vector<ConfidenceRegion>& regions, const ParameterPoint& theta0) {
  if (regions.empty()) throw InvalidArgument("coverage of an empty batch");
  const RegionKind kind = regions.front().kind();
  std::size_t hits = 0;
  std::vector<double> sizes;
  sizes.reserve(regions.size());
  for (const auto& r : regions) {
    if (r.kind() != kind) throw InvalidArgument("mixed region kinds in one coverage batch");
    if (r.contains(theta0)) ++hits;
    sizes.push_back(r.size());
  }
  CoverageScore score;
  score.count = regions.size();
  score.coverage = static_cast<double>(hits) / static_cast<double>(regions.size());
  score.median_size = stats::median(sizes);
  return score;
}

std::vector<double> cauchy_target_posterior_grid(const Dataset& data, double tau,
                                                 const std::vector<double>& grid) {
  if (!(tau > 0.0)) throw InvalidArgument("tau must be positive");
  if (grid.size() < 2) throw InvalidArgument("grid needs at least two points");
  if (data.size() == 0) throw InvalidArgument("posterior of an empty dataset");
  std::vector<double> log_post(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double lp = 0.0;
    for (double x : data.observations) {
      const double z = (x - grid[g]) / tau;
      lp -= std::log1p(z * z);
    }
    log_post[g] = lp;
  }
  const double top = *std::max_element(log_post.begin(), log_post.end());
  std::vector<double> density(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) density[g] = std::exp(log_post[g] - top);
  double area = 0.0;
  for (std::size_t g = 1; g < grid.size(); ++g) {
    area += 0.5 * (density[g] + density[g - 1]) * (grid[g] - grid[g - 1]);
  }
  if (!(area > 0.0)) throw DegenerateSampleError("posterior has no mass on the grid");
  for (double& d : density) d /= area;
  return density;
}

double ks_distance_to_grid(std::vector<double> sample, const std::vector<double>& grid,
                           const std::vector<double>& density) {
  if (sample.empty()) throw InvalidArgument("KS distance of an empty sample");
  if (grid.size() != density.size() || grid.size() < 2) throw InvalidArgument("grid and density disagree");
  std::vector<double> cdf(grid.size(), 0.0);
  for (std::size_t g = 1; g < grid.size(); ++g) {
    cdf[g] = cdf[g - 1] + 0.5 * (density[g] + density[g - 1]) * (grid[g] - grid[g - 1]);
  }
  const double total = cdf.back();
  for (double& c : cdf) c /= total;
  auto grid_cdf = [&](double x) {
    if (x <= grid.front()) return 0.0;
    if (x >= grid.back()) return 1.0;
    const auto it = std::upper_bound(grid.begin(), grid.end(), x);
    const std::size_t g = static_cast<std::size_t>(it - grid.begin());
    const double t = (x - grid[g - 1]) / (grid[g] - grid[g - 1]);
    return cdf[g - 1] + t * (cdf[g] - cdf[g - 1]);
  };
  std::sort(sample.begin(), sample.end());
  const double m = static_cast<double>(sample.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = grid_cdf(sample[i]);
    worst = std::max({worst, std::abs(static_cast<double>(i + 1) / m - f),
                      std::abs(static_cast<double>(i) / m - f)});
  }
  return worst;
}

}  // namespace acc
