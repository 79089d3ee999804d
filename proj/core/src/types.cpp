#include "acc/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "acc/errors.hpp"
#include "acc/stats.hpp"

namespace acc {

ToleranceTooSmallError::ToleranceTooSmallError(std::size_t attempts, double tolerance)
    : Error("no proposal accepted after " + std::to_string(attempts) +
            " attempts at tolerance " + std::to_string(tolerance)),
      attempts_(attempts),
      tolerance_(tolerance) {}

namespace {

std::string column_list(const std::vector<std::size_t>& columns) {
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(columns[i]);
  }
  return out;
}

}  // namespace

SingularDesignError::SingularDesignError(std::vector<std::size_t> columns)
    : Error("singular regression design; summary columns [" + column_list(columns) + "]"),
      columns_(std::move(columns)) {}

std::size_t ParticleSet::parameter_dim() const {
  return particles.empty() ? 0 : static_cast<std::size_t>(particles.front().theta.size());
}

double ParticleSet::acceptance_proportion() const {
  return attempts == 0 ? 0.0 : static_cast<double>(particles.size()) / static_cast<double>(attempts);
}

double ParticleSet::total_weight() const {
  double total = 0.0;
  for (const auto& p : particles) total += p.weight;
  return total;
}

double ParticleSet::effective_sample_size() const {
  double sum = 0.0, sum_sq = 0.0;
  for (const auto& p : particles) {
    sum += p.weight;
    sum_sq += p.weight * p.weight;
  }
  return sum_sq > 0.0 ? sum * sum / sum_sq : 0.0;
}

std::vector<double> ParticleSet::coordinate(std::size_t j) const {
  std::vector<double> out;
  out.reserve(particles.size());
  for (const auto& p : particles) out.push_back(p.theta(static_cast<Eigen::Index>(j)));
  return out;
}

std::vector<double> ParticleSet::weights() const {
  std::vector<double> out;
  out.reserve(particles.size());
  for (const auto& p : particles) out.push_back(p.weight);
  return out;
}

ParameterPoint weighted_mean(const ParticleSet& set) {
  if (set.empty()) throw DegenerateSampleError("weighted_mean of an empty particle set");
  const double total = set.total_weight();
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw DegenerateSampleError("particle weights sum to zero");
  }
  ParameterPoint acc = ParameterPoint::Zero(set.particles.front().theta.size());
  for (const auto& p : set.particles) acc += p.weight * p.theta;
  return acc / total;
}

Eigen::VectorXd weighted_variance(const ParticleSet& set) {
  return weighted_covariance(set).diagonal();
}

Eigen::MatrixXd weighted_covariance(const ParticleSet& set) {
  const ParameterPoint mu = weighted_mean(set);
  const double total = set.total_weight();
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(mu.size(), mu.size());
  for (const auto& p : set.particles) {
    const Eigen::VectorXd d = p.theta - mu;
    cov.noalias() += p.weight * d * d.transpose();
  }
  return cov / total;
}

namespace stats {

double mean(std::span<const double> values) {
  if (values.empty()) throw InvalidArgument("mean of empty input");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double standard_deviation(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double mu = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - mu) * (v - mu);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double median(std::span<const double> values) {
  if (values.empty()) throw InvalidArgument("median of empty input");
  std::vector<double> copy(values.begin(), values.end());
  const std::size_t k = (copy.size() - 1) / 2;
  std::nth_element(copy.begin(), copy.begin() + static_cast<std::ptrdiff_t>(k), copy.end());
  if (copy.size() % 2 == 1) return copy[k];
  const double upper = *std::min_element(copy.begin() + static_cast<std::ptrdiff_t>(k) + 1, copy.end());
  return 0.5 * (copy[k] + upper);
}

double mad(std::span<const double> values) {
  const double m = median(values);
  std::vector<double> dev;
  dev.reserve(values.size());
  for (double v : values) dev.push_back(std::abs(v - m));
  return median(dev);
}

double lower_quantile(std::span<const double> values, double alpha) {
  if (values.empty()) throw InvalidArgument("quantile of empty input");
  std::vector<double> copy(values.begin(), values.end());
  const auto m = static_cast<double>(copy.size());
  auto rank = static_cast<std::size_t>(std::ceil(m * alpha - 1e-12));
  rank = std::clamp<std::size_t>(rank, 1, copy.size());
  std::nth_element(copy.begin(), copy.begin() + static_cast<std::ptrdiff_t>(rank - 1), copy.end());
  return copy[rank - 1];
}

double interquartile_range(std::span<const double> values) {
  return lower_quantile(values, 0.75) - lower_quantile(values, 0.25);
}

double weighted_quantile(std::span<const double> values, std::span<const double> weights,
                         double alpha) {
  if (values.empty()) throw InvalidArgument("quantile of empty input");
  if (values.size() != weights.size()) throw InvalidArgument("values and weights differ in length");
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) throw DegenerateSampleError("weights sum to zero");
  const double target = alpha * total * (1.0 - 1e-12);
  double cumulative = 0.0;
  for (std::size_t idx : order) {
    cumulative += weights[idx];
    if (cumulative >= target && weights[idx] > 0.0) return values[idx];
  }
  return values[order.back()];
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw InvalidArgument("KS statistic of empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

}  // namespace stats

}  // namespace acc
