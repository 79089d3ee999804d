#include "acc/initial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "acc/errors.hpp"
#include "acc/parallel.hpp"
#include "acc/stats.hpp"

namespace acc {

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;

}  // namespace

KdeEstimate::KdeEstimate(std::vector<ParameterPoint> centers, Eigen::VectorXd bandwidth)
    : bandwidth_(std::move(bandwidth)) {
  if (centers.size() < 2) throw InvalidArgument("a KDE needs at least two centers");
  for (const auto& c : centers) {
    if (c.size() != bandwidth_.size()) throw InvalidArgument("center dimension mismatch");
    if (!c.allFinite()) throw InvalidArgument("KDE center is not finite");
  }
  if (!(bandwidth_.minCoeff() > 0.0)) throw InvalidArgument("bandwidth must be positive");
  centers_ = std::make_shared<const std::vector<ParameterPoint>>(std::move(centers));
  log_norm_ = -std::log(static_cast<double>(centers_->size())) -
              bandwidth_.array().log().sum() - static_cast<double>(dim()) * kLogSqrt2Pi;
}

double KdeEstimate::log_density(const ParameterPoint& theta) const {
  if (theta.size() != bandwidth_.size()) throw InvalidArgument("parameter dimension mismatch");
  std::vector<double> terms(centers_->size());
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < terms.size(); ++i) {
    terms[i] = -0.5 * ((theta - (*centers_)[i]).array() / bandwidth_.array()).square().sum();
    best = std::max(best, terms[i]);
  }
  if (!std::isfinite(best)) return -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (double t : terms) sum += std::exp(t - best);
  return log_norm_ + best + std::log(sum);
}

double KdeEstimate::density(const ParameterPoint& theta) const {
  return std::exp(log_density(theta));
}

ParameterPoint KdeEstimate::sample(RngStream& rng) const {
  const std::size_t k = centers_->size();
  const auto pick = std::min<std::size_t>(static_cast<std::size_t>(rng.uniform() * static_cast<double>(k)), k - 1);
  ParameterPoint out = (*centers_)[pick];
  for (Eigen::Index j = 0; j < out.size(); ++j) out[j] += bandwidth_[j] * rng.normal();
  return out;
}

ParameterPoint KdeEstimate::mean() const {
  ParameterPoint m = ParameterPoint::Zero(bandwidth_.size());
  for (const auto& c : *centers_) m += c;
  return m / static_cast<double>(centers_->size());
}

Eigen::VectorXd KdeEstimate::standard_deviation() const {
  const ParameterPoint m = mean();
  Eigen::VectorXd var = Eigen::VectorXd::Zero(bandwidth_.size());
  for (const auto& c : *centers_) var += (c - m).array().square().matrix();
  var /= static_cast<double>(centers_->size());
  return (var.array() + bandwidth_.array().square()).sqrt();
}

ProposalDistribution KdeEstimate::as_proposal() const {
  ProposalDistribution out;
  out.dim = dim();
  auto self = std::make_shared<const KdeEstimate>(*this);
  out.sample = [self](RngStream& rng) { return self->sample(rng); };
  out.log_density = [self](const ParameterPoint& theta) { return self->log_density(theta); };
  return out;
}

Eigen::VectorXd kde_bandwidth(const std::vector<ParameterPoint>& centers) {
  if (centers.size() < 2) throw InvalidArgument("bandwidth needs at least two centers");
  const Eigen::Index p = centers.front().size();
  const double k = static_cast<double>(centers.size());
  Eigen::VectorXd h(p);
  std::vector<double> column(centers.size());
  for (Eigen::Index j = 0; j < p; ++j) {
    for (std::size_t i = 0; i < centers.size(); ++i) column[i] = centers[i][j];
    const double sd = stats::standard_deviation(column);
    const double iqr = stats::interquartile_range(column) / 1.34;
    double spread = std::min(sd, iqr);
    if (!(spread > 0.0)) spread = std::max(sd, iqr);
    const double floor = 1e-8 * (1.0 + std::abs(stats::median(column)));
    h[j] = std::max(0.9 * spread * std::pow(k, -0.2), floor);
  }
  return h;
}

OverlapPolicy parse_overlap_policy(const std::string& name) {
  if (name == "disjoint") return OverlapPolicy::disjoint;
  if (name == "overlapping") return OverlapPolicy::overlapping;
  throw ValidationError("unknown overlap policy '" + name + "'");
}

namespace {

std::size_t subset_size_for(std::size_t n, const MinibatchConfig& config) {
  if (config.subset_size != 0) return config.subset_size;
  if (!(config.nu > 0.0 && config.nu < 1.0)) throw ValidationError("nu must lie in (0, 1)");
  return static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(n), config.nu) + 1e-9));
}

}  // namespace

std::vector<Dataset> minibatch_subsets(const Dataset& data, const MinibatchConfig& config,
                                       std::uint64_t seed) {
  const std::size_t n = data.size();
  if (n < 4) throw InvalidArgument("minibatch construction needs at least 4 observations");
  const std::size_t m = subset_size_for(n, config);
  if (m < 2 || m > n) throw ValidationError("subset size " + std::to_string(m) + " is invalid for n = " + std::to_string(n));

  std::vector<Dataset> out;
  if (config.policy == OverlapPolicy::disjoint) {
    const std::size_t fit = n / m;
    const std::size_t k = config.batches != 0 ? config.batches : fit;
    if (k > fit) throw ValidationError("too many disjoint batches for the data size");
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    RngStream rng(seed, 0);
    for (std::size_t i = n - 1; i > 0; --i) {
      const auto j = std::min<std::size_t>(static_cast<std::size_t>(rng.uniform() * static_cast<double>(i + 1)), i);
      std::swap(perm[i], perm[j]);
    }
    for (std::size_t b = 0; b < k; ++b) {
      Dataset subset;
      subset.observations.reserve(m);
      for (std::size_t t = 0; t < m; ++t) subset.observations.push_back(data.observations[perm[b * m + t]]);
      out.push_back(std::move(subset));
    }
  } else {
    if (config.stride == 0) throw ValidationError("stride must be positive");
    const std::size_t fit = (n - m) / config.stride + 1;
    const std::size_t k = config.batches != 0 ? config.batches : fit;
    if (k > fit) throw ValidationError("too many overlapping windows for the data size");
    for (std::size_t b = 0; b < k; ++b) {
      const auto first = data.observations.begin() + static_cast<std::ptrdiff_t>(b * config.stride);
      out.push_back(Dataset{std::vector<double>(first, first + static_cast<std::ptrdiff_t>(m))});
    }
  }
  if (out.size() < 2) throw ValidationError("the minibatch scheme needs at least two subsets");
  return out;
}

std::vector<ParameterPoint> minibatch_estimates(const std::vector<Dataset>& subsets,
                                                const MinibatchConfig& config, std::uint64_t seed) {
  if (!config.estimator) throw InvalidArgument("no point estimator configured");
  std::vector<ParameterPoint> out(subsets.size());
  parallel_for(subsets.size(), config.workers, [&](std::size_t i) {
    RngStream rng = substream(seed, i);
    try {
      out[i] = config.estimator(subsets[i], rng);
    } catch (const std::exception& e) {
      throw Error("point estimator failed on subset " + std::to_string(i) + ": " + e.what());
    }
    if (!out[i].allFinite()) {
      throw DegenerateSampleError("point estimator returned a non-finite value on subset " +
                                  std::to_string(i));
    }
  });
  return out;
}

KdeEstimate minibatch_rn(const Dataset& data, const MinibatchConfig& config, std::uint64_t seed) {
  const auto subsets = minibatch_subsets(data, config, derive_seed(seed, 0));
  auto centers = minibatch_estimates(subsets, config, derive_seed(seed, 1));
  Eigen::VectorXd h = kde_bandwidth(centers);
  return KdeEstimate(std::move(centers), std::move(h));
}

RefinedMinibatch refined_minibatch_rn(const Dataset& data, const MinibatchConfig& config,
                                      const GenerativeModel& model, const RefineConfig& refine,
                                      std::uint64_t seed) {
  const auto subsets = minibatch_subsets(data, config, derive_seed(seed, 0));
  auto crude_centers = minibatch_estimates(subsets, config, derive_seed(seed, 1));
  KdeEstimate crude(crude_centers, kde_bandwidth(crude_centers));
  RefinedMinibatch out{crude, crude_centers, crude_centers, {}};
  if (refine.iterations == 0) return out;
  if (!(refine.initial_quantile > refine.final_quantile && refine.final_quantile > 0.0 &&
        refine.initial_quantile < 1.0)) {
    throw ValidationError("refinement quantiles must satisfy 0 < final < initial < 1");
  }

  const ProposalDistribution crude_proposal = crude.as_proposal();
  const ProposalDistribution target = refine.target.log_density ? refine.target : flat_target(model.parameter_dim());
  for (std::size_t i = 0; i < subsets.size(); ++i) {
    const std::uint64_t subset_seed = derive_seed(seed, 100 + i);
    const auto local = model.bind(subsets[i]);
    const SummaryVector s_i = local->summarize(subsets[i]);
    const std::string tag = "subset " + std::to_string(i) + ": ";
    try {
      if (!s_i.allFinite()) throw DegenerateSampleError("subset summary is not finite");
      const ProposalBatch pilot = simulate_proposals(*local, crude_proposal, 0, refine.particles,
                                                     derive_seed(subset_seed, 0), refine.workers);
      std::vector<SummaryVector> sims;
      for (std::size_t j = 0; j < pilot.size(); ++j) {
        if (pilot.simulated[j] && pilot.summaries[j].allFinite()) sims.push_back(pilot.summaries[j]);
      }
      if (sims.size() < 2) throw DegenerateSampleError("pilot produced no usable simulations");
      const KernelSpec kernel(refine.kernel, 1.0, mad_scale(sims));
      std::vector<double> distances;
      for (const auto& d : summary_distances(pilot, s_i, kernel)) {
        if (std::isfinite(d)) distances.push_back(d);
      }
      const double eps_first = stats::lower_quantile(distances, refine.initial_quantile);
      const double eps_last = stats::lower_quantile(distances, refine.final_quantile);
      if (!(eps_last > 0.0 && eps_first > eps_last)) {
        throw DegenerateSampleError("pilot distances give no decreasing tolerance schedule");
      }
      PmcConfig pmc;
      pmc.particles_per_iter = refine.particles;
      pmc.kernel = kernel;
      pmc.workers = refine.workers;
      const std::size_t t_max = refine.iterations;
      for (std::size_t t = 0; t < t_max; ++t) {
        const double frac = t_max == 1 ? 1.0 : static_cast<double>(t) / static_cast<double>(t_max - 1);
        pmc.epsilon_schedule.push_back(eps_first * std::pow(eps_last / eps_first, frac));
      }
      if (t_max == 1) pmc.epsilon_schedule.back() = eps_last;
      PmcResult result = pmc_refine(*local, crude_proposal, target, s_i, pmc, derive_seed(subset_seed, 1));
      for (const auto& w : result.warnings) out.warnings.push_back(tag + w);
      const ParameterPoint refined = weighted_mean(result.particles);
      if (!refined.allFinite()) throw DegenerateSampleError("refined estimate is not finite");
      out.refined_centers[i] = refined;
    } catch (const Error& e) {
      out.warnings.push_back(tag + "keeping crude estimate (" + e.what() + ")");
    }
  }
  out.kde = KdeEstimate(out.refined_centers, kde_bandwidth(out.refined_centers));
  return out;
}

ProposalDistribution improper_location(double lower, double upper) {
  Box box{Eigen::VectorXd::Constant(1, lower), Eigen::VectorXd::Constant(1, upper)};
  return improper_box(box, {BoxCoordinate::flat});
}

ProposalDistribution improper_scale(double lower, double upper) {
  Box box{Eigen::VectorXd::Constant(1, lower), Eigen::VectorXd::Constant(1, upper)};
  return improper_box(box, {BoxCoordinate::reciprocal});
}

ProposalDistribution improper_box(const Box& box, const std::vector<BoxCoordinate>& kinds) {
  const auto p = box.lower.size();
  if (box.upper.size() != p || static_cast<Eigen::Index>(kinds.size()) != p || p == 0) {
    throw InvalidArgument("box and coordinate kinds disagree in dimension");
  }
  for (Eigen::Index j = 0; j < p; ++j) {
    if (!(box.lower[j] < box.upper[j]) || !std::isfinite(box.lower[j]) || !std::isfinite(box.upper[j])) {
      throw InvalidArgument("empty or unbounded truncation box");
    }
    if (kinds[static_cast<std::size_t>(j)] == BoxCoordinate::reciprocal && !(box.lower[j] > 0.0)) {
      throw InvalidArgument("a 1/x coordinate needs a positive lower bound");
    }
  }
  ProposalDistribution out;
  out.dim = static_cast<std::size_t>(p);
  out.sample = [box, kinds](RngStream& rng) {
    ParameterPoint theta(box.lower.size());
    for (Eigen::Index j = 0; j < theta.size(); ++j) {
      const double u = rng.uniform();
      if (kinds[static_cast<std::size_t>(j)] == BoxCoordinate::flat) {
        theta[j] = box.lower[j] + u * (box.upper[j] - box.lower[j]);
      } else {
        theta[j] = box.lower[j] * std::exp(u * std::log(box.upper[j] / box.lower[j]));
      }
    }
    return theta;
  };
  out.log_density = [box, kinds](const ParameterPoint& theta) {
    double lp = 0.0;
    for (Eigen::Index j = 0; j < theta.size(); ++j) {
      if (theta[j] < box.lower[j] || theta[j] > box.upper[j]) {
        return -std::numeric_limits<double>::infinity();
      }
      if (kinds[static_cast<std::size_t>(j)] == BoxCoordinate::reciprocal) lp -= std::log(theta[j]);
    }
    return lp;
  };
  return out;
}

std::pair<double, double> location_box(const Dataset& data, double iqr_multiple) {
  if (data.size() < 2) throw InvalidArgument("location box needs at least two observations");
  const double q1 = stats::lower_quantile(data.observations, 0.25);
  const double q3 = stats::lower_quantile(data.observations, 0.75);
  const double iqr = q3 - q1;
  if (!(iqr > 0.0)) throw DegenerateSampleError("data have zero interquartile range");
  return {q1 - iqr_multiple * iqr, q3 + iqr_multiple * iqr};
}

std::pair<double, double> scale_box(const Dataset& data, double factor) {
  if (data.size() < 2) throw InvalidArgument("scale box needs at least two observations");
  if (!(factor > 1.0)) throw InvalidArgument("scale box factor must exceed 1");
  const double m = stats::mad(data.observations);
  if (!(m > 0.0)) throw DegenerateSampleError("data have zero MAD");
  return {m / factor, m * factor};
}

ProposalDistribution normal_proposal(double mu, double inverse_sd) {
  if (!(inverse_sd > 0.0) || !std::isfinite(mu)) throw InvalidArgument("normal proposal needs b > 0");
  ProposalDistribution out;
  out.dim = 1;
  out.sample = [mu, inverse_sd](RngStream& rng) {
    return ParameterPoint::Constant(1, mu + rng.normal() / inverse_sd);
  };
  out.log_density = [mu, inverse_sd](const ParameterPoint& theta) {
    const double z = (theta[0] - mu) * inverse_sd;
    return std::log(inverse_sd) - kLogSqrt2Pi - 0.5 * z * z;
  };
  return out;
}

ProposalDistribution student_t_proposal(double df, double location, double scale) {
  if (!(df > 0.0) || !(scale > 0.0)) throw InvalidArgument("t proposal needs df > 0 and scale > 0");
  ProposalDistribution out;
  out.dim = 1;
  out.sample = [df, location, scale](RngStream& rng) {
    const double chi = 2.0 * std::gamma_distribution<double>(0.5 * df, 1.0)(rng);
    return ParameterPoint::Constant(1, location + scale * rng.normal() / std::sqrt(chi / df));
  };
  const double log_c = std::lgamma(0.5 * (df + 1.0)) - std::lgamma(0.5 * df) -
                       0.5 * std::log(df * std::numbers::pi) - std::log(scale);
  out.log_density = [df, location, scale, log_c](const ParameterPoint& theta) {
    const double z = (theta[0] - location) / scale;
    return log_c - 0.5 * (df + 1.0) * std::log1p(z * z / df);
  };
  return out;
}

}  // namespace acc
