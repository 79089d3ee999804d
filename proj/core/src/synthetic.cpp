#include <cmath>
#include <limits>

#include "acc/errors.hpp"
#include "acc/models.hpp"
#include "acc/optimize.hpp"

namespace acc {

double gaussian_synthetic_loglik(const SummaryVector& s_obs, const Eigen::VectorXd& mean,
                                 const Eigen::MatrixXd& covariance) {
  if (mean.size() != s_obs.size() || covariance.rows() != s_obs.size() || covariance.cols() != s_obs.size()) {
    throw InvalidArgument("synthetic likelihood dimension mismatch");
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(covariance);
  if (llt.info() != Eigen::Success) throw DomainError("synthetic covariance is not positive definite");
  const Eigen::VectorXd z = llt.matrixL().solve(s_obs - mean);
  const double log_det = 2.0 * Eigen::MatrixXd(llt.matrixL()).diagonal().array().log().sum();
  return -0.5 * z.squaredNorm() - 0.5 * log_det;
}

double synthetic_loglik(const ParameterPoint& theta, const SummaryVector& s_obs, const GenerativeModel& model,
                        const SyntheticLikelihoodConfig& config, std::uint64_t seed) {
  const auto d = static_cast<std::size_t>(s_obs.size());
  if (config.replicates < d + 2) throw ValidationError("synthetic likelihood needs at least d + 2 replicates");
  if (!model.in_domain(theta)) return -std::numeric_limits<double>::infinity();

  std::vector<SummaryVector> sims;
  sims.reserve(config.replicates);
  for (std::size_t j = 0; j < config.replicates; ++j) {
    RngStream rng = substream(seed, j);
    SummaryVector s = model.summarize(model.simulate(theta, rng));
    if (s.allFinite()) sims.push_back(std::move(s));
  }
  if (sims.size() < d + 2) return -std::numeric_limits<double>::infinity();

  const double r = static_cast<double>(sims.size());
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(s_obs.size());
  for (const auto& s : sims) mean += s;
  mean /= r;
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(s_obs.size(), s_obs.size());
  for (const auto& s : sims) {
    const Eigen::VectorXd c = s - mean;
    cov.noalias() += c * c.transpose();
  }
  cov /= (r - 1.0);
  const double trace = cov.trace();
  cov.diagonal().array() += 1e-8 * (trace > 0.0 ? trace : 1.0) / static_cast<double>(d);
  try {
    return gaussian_synthetic_loglik(s_obs, mean, cov);
  } catch (const DomainError&) {
    return -std::numeric_limits<double>::infinity();
  }
}

MslResult max_synthetic_likelihood(const GenerativeModel& model, const SummaryVector& s_obs,
                                   const ParameterPoint& start, const SyntheticLikelihoodConfig& config,
                                   std::uint64_t seed) {
  if (static_cast<std::size_t>(start.size()) != model.parameter_dim()) {
    throw InvalidArgument("start point has the wrong dimension");
  }
  MslResult best{start, -std::numeric_limits<double>::infinity(), 0, false};
  if (config.max_evaluations == 0) return best;

  const std::uint64_t sim_seed = derive_seed(seed, 0);
  auto objective = [&](const Eigen::VectorXd& theta) {
    const double ll = synthetic_loglik(theta, s_obs, model, config, sim_seed);
    return std::isfinite(ll) ? -ll : std::numeric_limits<double>::infinity();
  };
  const Eigen::VectorXd step = Eigen::VectorXd::Constant(start.size(), config.initial_step);
  const std::size_t runs = std::max<std::size_t>(config.restarts, 1);
  for (std::size_t k = 0; k < runs; ++k) {
    ParameterPoint from = start;
    if (k > 0) {
      RngStream rng = substream(derive_seed(seed, 1), k);
      for (Eigen::Index j = 0; j < from.size(); ++j) from[j] += config.restart_spread * rng.normal();
    }
    const double at_start = objective(from);
    const NelderMeadResult nm = nelder_mead(objective, from, step, config.max_evaluations);
    best.evaluations += nm.evaluations + 1;
    if (nm.value < at_start) best.improved = true;
    const double ll = -nm.value;
    if (std::isfinite(ll) && ll > best.loglik) {
      best.loglik = ll;
      best.estimate = nm.argmin;
    } else if (!std::isfinite(best.loglik) && std::isfinite(-at_start) && -at_start > best.loglik) {
      best.loglik = -at_start;
      best.estimate = from;
    }
  }
  return best;
}

}  // namespace acc
