#include <algorithm>
#include <cmath>
#include <random>

#include "acc/errors.hpp"
#include "acc/models.hpp"
#include "acc/stats.hpp"

namespace acc {

RickerModel::RickerModel(std::size_t n, std::size_t burn_in) : n_(n), burn_in_(burn_in) {
  if (n < 6) throw InvalidArgument("the Ricker summaries need at least 6 observations");
}

RickerParams RickerModel::natural(const ParameterPoint& theta) {
  if (theta.size() != 3) throw InvalidArgument("Ricker parameters have 3 coordinates");
  return {std::exp(theta[0]), std::exp(theta[1]), std::exp(theta[2])};
}

ParameterPoint RickerModel::log_parameters(const RickerParams& params) {
  ParameterPoint theta(3);
  theta << std::log(params.r), std::log(params.sigma), std::log(params.phi);
  return theta;
}

bool RickerModel::in_domain(const ParameterPoint& theta) const {
  if (theta.size() != 3 || !theta.allFinite()) return false;
  const RickerParams p = natural(theta);
  return p.r > 0.0 && p.sigma > 0.0 && p.phi > 0.0 && std::isfinite(p.r) && std::isfinite(p.sigma) &&
         std::isfinite(p.phi);
}

std::vector<double> RickerModel::latent_path(const RickerParams& params, double n0, std::size_t steps,
                                             RngStream& rng) {
  std::vector<double> path(steps);
  double current = n0;
  for (std::size_t t = 0; t < steps; ++t) {
    const double e = params.sigma > 0.0 ? params.sigma * rng.normal() : 0.0;
    current = params.r * current * std::exp(-current + e);
    if (!std::isfinite(current)) current = std::numeric_limits<double>::max();
    path[t] = current;
  }
  return path;
}

Dataset RickerModel::simulate(const ParameterPoint& theta, RngStream& rng) const {
  if (!in_domain(theta)) throw DomainError("Ricker parameters outside the domain");
  const RickerParams p = natural(theta);
  const double n0 = 0.5 + rng.uniform();
  const std::vector<double> path = latent_path(p, n0, burn_in_ + n_, rng);
  Dataset data;
  data.observations.resize(n_);
  for (std::size_t t = 0; t < n_; ++t) {
    const double mean = std::min(p.phi * path[burn_in_ + t], 1e12);
    data.observations[t] = mean > 0.0 ? static_cast<double>(std::poisson_distribution<long long>(mean)(rng)) : 0.0;
  }
  return data;
}

namespace {

std::vector<double> sorted_diffs(std::span<const double> y) {
  std::vector<double> d;
  d.reserve(y.size() - 1);
  for (std::size_t t = 1; t < y.size(); ++t) d.push_back(y[t] - y[t - 1]);
  std::sort(d.begin(), d.end());
  return d;
}

Eigen::VectorXd min_norm_solve(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  return Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(x).solve(y);
}

}  // namespace

SummaryVector ricker_wood_summaries(std::span<const double> y, std::span<const double> sorted_reference_diffs) {
  const std::size_t n = y.size();
  if (n < 6) throw InvalidArgument("the Ricker summaries need at least 6 observations");
  if (sorted_reference_diffs.size() != n - 1) throw InvalidArgument("reference differences have the wrong length");
  SummaryVector s(13);
  const double mean = stats::mean(y);
  s[0] = mean;
  s[1] = static_cast<double>(std::count(y.begin(), y.end(), 0.0));
  for (std::size_t lag = 0; lag <= 5; ++lag) {
    double acc = 0.0;
    for (std::size_t t = 0; t + lag < n; ++t) acc += (y[t] - mean) * (y[t + lag] - mean);
    s[static_cast<Eigen::Index>(2 + lag)] = acc / static_cast<double>(n);
  }

  const std::vector<double> d = sorted_diffs(y);
  const auto m = static_cast<Eigen::Index>(n - 1);
  Eigen::MatrixXd x(m, 3);
  Eigen::VectorXd target(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double r = sorted_reference_diffs[static_cast<std::size_t>(i)];
    x(i, 0) = r;
    x(i, 1) = r * r;
    x(i, 2) = r * r * r;
    target[i] = d[static_cast<std::size_t>(i)];
  }
  s.segment(8, 3) = min_norm_solve(x, target);

  Eigen::MatrixXd z(m, 2);
  Eigen::VectorXd next(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double a = std::pow(y[static_cast<std::size_t>(i)], 0.3);
    z(i, 0) = a;
    z(i, 1) = a * a;
    next[i] = std::pow(y[static_cast<std::size_t>(i) + 1], 0.3);
  }
  s.segment(11, 2) = min_norm_solve(z, next);
  return s;
}

SummaryVector RickerModel::summarize(const Dataset& data) const {
  const auto& y = data.observations;
  if (y.size() < 6) throw InvalidArgument("the Ricker summaries need at least 6 observations");
  if (reference_diffs_ && reference_diffs_->size() == y.size() - 1) {
    return ricker_wood_summaries(y, *reference_diffs_);
  }
  const std::vector<double> own = sorted_diffs(y);
  return ricker_wood_summaries(y, own);
}

std::unique_ptr<GenerativeModel> RickerModel::bind(const Dataset& observed) const {
  auto bound = std::make_unique<RickerModel>(observed.size(), burn_in_);
  bound->reference_diffs_ = std::make_shared<const std::vector<double>>(sorted_diffs(observed.observations));
  return bound;
}

}  // namespace acc
