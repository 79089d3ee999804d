#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

#include "acc/errors.hpp"
#include "acc/samplers.hpp"

namespace acc {

namespace {

struct Mixture {
  std::vector<ParameterPoint> centers;
  std::vector<double> log_weights;
  std::vector<double> cumulative;
  Eigen::MatrixXd lower;
  double log_norm = 0.0;
};

// nullptr when the weighted covariance is not positive definite
std::shared_ptr<const Mixture> build_mixture(const ParticleSet& particles) {
  const Eigen::MatrixXd cov = 2.0 * weighted_covariance(particles);
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) return nullptr;
  const Eigen::MatrixXd lower = llt.matrixL();
  const Eigen::VectorXd diag = lower.diagonal();
  if (!(diag.minCoeff() > 1e-12 * std::max(1.0, diag.maxCoeff()))) return nullptr;

  auto mix = std::make_shared<Mixture>();
  mix->lower = lower;
  const double d = static_cast<double>(cov.rows());
  mix->log_norm = -0.5 * d * std::log(2.0 * std::numbers::pi) - diag.array().log().sum();
  const double total = particles.total_weight();
  for (const auto& p : particles.particles) {
    if (!(p.weight > 0.0)) continue;
    mix->centers.push_back(p.theta);
    mix->log_weights.push_back(std::log(p.weight / total));
    const double prev = mix->cumulative.empty() ? 0.0 : mix->cumulative.back();
    mix->cumulative.push_back(prev + p.weight / total);
  }
  return mix;
}

ProposalDistribution mixture_proposal(std::shared_ptr<const Mixture> mix, std::size_t dim) {
  ProposalDistribution out;
  out.dim = dim;
  out.sample = [mix, dim](RngStream& rng) -> ParameterPoint {
    const double u = rng.uniform() * mix->cumulative.back();
    const auto it = std::upper_bound(mix->cumulative.begin(), mix->cumulative.end(), u);
    const std::size_t pick = std::min<std::size_t>(
        static_cast<std::size_t>(it - mix->cumulative.begin()), mix->centers.size() - 1);
    Eigen::VectorXd z(static_cast<Eigen::Index>(dim));
    for (Eigen::Index k = 0; k < z.size(); ++k) z[k] = rng.normal();
    return mix->centers[pick] + mix->lower * z;
  };
  out.log_density = [mix](const ParameterPoint& theta) {
    double best = -std::numeric_limits<double>::infinity();
    std::vector<double> terms(mix->centers.size());
    for (std::size_t j = 0; j < mix->centers.size(); ++j) {
      const Eigen::VectorXd z =
          mix->lower.triangularView<Eigen::Lower>().solve(theta - mix->centers[j]);
      terms[j] = mix->log_weights[j] - 0.5 * z.squaredNorm();
      best = std::max(best, terms[j]);
    }
    double sum = 0.0;
    for (double t : terms) sum += std::exp(t - best);
    return mix->log_norm + best + std::log(sum);
  };
  return out;
}

}  // namespace

PmcResult pmc_refine(const GenerativeModel& model, const ProposalDistribution& initial,
                     const ProposalDistribution& target_prior, const SummaryVector& s_obs,
                     const PmcConfig& config, std::uint64_t seed) {
  if (config.epsilon_schedule.empty()) throw ValidationError("epsilon schedule is empty");
  for (std::size_t t = 0; t < config.epsilon_schedule.size(); ++t) {
    if (!(config.epsilon_schedule[t] > 0.0)) throw ValidationError("epsilon must be positive");
    if (t > 0 && !(config.epsilon_schedule[t] < config.epsilon_schedule[t - 1])) {
      throw ValidationError("epsilon schedule must be strictly decreasing");
    }
  }
  if (config.particles_per_iter == 0) throw ValidationError("particles_per_iter must be positive");

  const std::size_t dim = model.parameter_dim();
  const ProposalDistribution target =
      target_prior.log_density ? target_prior : flat_target(dim);

  PmcResult result;
  ProposalDistribution proposal = initial;
  for (std::size_t t = 0; t < config.epsilon_schedule.size(); ++t) {
    SamplerConfig sc;
    sc.stopping = TargetAccepted{config.particles_per_iter,
                                 config.max_attempts_factor * config.particles_per_iter};
    sc.kernel = config.kernel.with_epsilon(config.epsilon_schedule[t]);
    sc.workers = config.workers;
    const std::uint64_t iter_seed = t == 0 ? seed : derive_seed(seed, t);
    result.particles = abc_importance(model, target, proposal, s_obs, sc, iter_seed);

    const double ess = result.particles.effective_sample_size();
    result.ess_history.push_back(ess);
    if (ess < 0.05 * static_cast<double>(result.particles.size())) {
      result.warnings.push_back("iteration " + std::to_string(t + 1) +
                                ": effective sample size " + std::to_string(ess) +
                                " is below 5% of the particle count");
    }

    auto mix = build_mixture(result.particles);
    if (mix) {
      proposal = mixture_proposal(std::move(mix), dim);
    } else {
      result.warnings.push_back("iteration " + std::to_string(t + 1) +
                                ": degenerate particle covariance, reverting to the initial proposal");
      proposal = initial;
    }
  }
  result.proposal = proposal;
  return result;
}

}  // namespace acc
