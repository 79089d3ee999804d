#include "acc/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "acc/errors.hpp"
#include "acc/parallel.hpp"

namespace acc {

void SamplerConfig::validate() const {
  if (const auto* fixed = std::get_if<FixedProposals>(&stopping)) {
    if (fixed->count == 0) throw ValidationError("n_proposals must be positive");
  } else {
    const auto& target = std::get<TargetAccepted>(stopping);
    if (target.count == 0) throw ValidationError("target_accepted must be positive");
    if (target.max_attempts != 0 && target.max_attempts < target.count) {
      throw ValidationError("max_attempts is below target_accepted");
    }
    if (std::holds_alternative<FixedAcceptanceProportion>(mode)) {
      throw ValidationError("acceptance-proportion mode needs a fixed number of proposals");
    }
  }
  if (const auto* q = std::get_if<FixedAcceptanceProportion>(&mode)) {
    if (!(q->proportion > 0.0 && q->proportion < 1.0)) {
      throw ValidationError("acceptance proportion must lie in (0, 1)");
    }
  }
}

ProposalBatch simulate_proposals(const GenerativeModel& model, const ProposalDistribution& proposal,
                                 std::size_t first, std::size_t count, std::uint64_t seed,
                                 unsigned workers) {
  if (proposal.dim != model.parameter_dim()) {
    throw InvalidArgument("proposal dimension " + std::to_string(proposal.dim) +
                          " does not match model dimension " +
                          std::to_string(model.parameter_dim()));
  }
  ProposalBatch batch;
  batch.thetas.resize(count);
  batch.summaries.resize(count);
  batch.accept_uniforms.resize(count);
  std::vector<char> simulated(count, 0);
  if (!model.concurrent_safe()) workers = 1;

  parallel_for(count, workers, [&](std::size_t k) {
    RngStream rng = substream(seed, first + k);
    ParameterPoint theta = proposal.sample(rng);
    if (model.in_domain(theta)) {
      const Dataset data = model.simulate(theta, rng);
      batch.summaries[k] = model.summarize(data);
      simulated[k] = 1;
    } else {
      batch.summaries[k] = SummaryVector::Constant(static_cast<Eigen::Index>(model.summary_dim()),
                                                   std::numeric_limits<double>::quiet_NaN());
    }
    batch.accept_uniforms[k] = rng.uniform();
    batch.thetas[k] = std::move(theta);
  });
  batch.simulated.assign(simulated.begin(), simulated.end());
  return batch;
}

std::vector<double> summary_distances(const ProposalBatch& batch, const SummaryVector& s_obs,
                                      const KernelSpec& kernel) {
  if (!s_obs.allFinite()) throw InvalidArgument("observed summary is not finite");
  std::vector<double> out(batch.size(), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (!batch.simulated[i]) continue;
    const SummaryVector& s = batch.summaries[i];
    if (s.size() != s_obs.size()) throw InvalidArgument("summary dimension mismatch");
    if (!s.allFinite()) continue;
    out[i] = kernel.scaled_norm(s - s_obs);
  }
  return out;
}

namespace {

Particle make_particle(const ProposalBatch& batch, std::size_t i) {
  return Particle{batch.thetas[i], batch.summaries[i], 1.0};
}

}  // namespace

ParticleSet select_by_proportion(const ProposalBatch& batch, const std::vector<double>& distances,
                                 double proportion) {
  if (!(proportion > 0.0 && proportion <= 1.0)) {
    throw InvalidArgument("acceptance proportion must lie in (0, 1]");
  }
  const std::size_t n = batch.size();
  std::size_t keep = static_cast<std::size_t>(std::ceil(proportion * static_cast<double>(n) - 1e-9));
  keep = std::clamp<std::size_t>(keep, 1, n);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto by_distance = [&](std::size_t a, std::size_t b) {
    return distances[a] < distances[b] || (distances[a] == distances[b] && a < b);
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(),
                    by_distance);
  order.resize(keep);
  while (!order.empty() && !std::isfinite(distances[order.back()])) order.pop_back();
  if (order.empty()) throw ToleranceTooSmallError(n, std::numeric_limits<double>::infinity());

  ParticleSet set;
  set.attempts = n;
  set.tolerance = distances[order.back()];
  std::sort(order.begin(), order.end());
  set.particles.reserve(order.size());
  for (std::size_t i : order) set.particles.push_back(make_particle(batch, i));
  return set;
}

ParticleSet select_by_kernel(const ProposalBatch& batch, const std::vector<double>& distances,
                             const KernelSpec& kernel) {
  ParticleSet set;
  set.attempts = batch.size();
  set.tolerance = kernel.epsilon();
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (!std::isfinite(distances[i])) continue;
    const double p = accept_probability_at_distance(kernel.family(), kernel.epsilon(), distances[i]);
    if (batch.accept_uniforms[i] < p) set.particles.push_back(make_particle(batch, i));
  }
  return set;
}

ParticleSet select_from_batch(const ProposalBatch& batch, const SummaryVector& s_obs,
                              const SamplerConfig& config) {
  if (const auto* q = std::get_if<FixedAcceptanceProportion>(&config.mode)) {
    KernelSpec kernel = config.kernel;
    if (q->standardize) {
      std::vector<SummaryVector> pilot;
      pilot.reserve(batch.size());
      for (std::size_t i = 0; i < batch.size(); ++i) {
        if (batch.simulated[i] && batch.summaries[i].allFinite()) pilot.push_back(batch.summaries[i]);
      }
      if (pilot.empty()) throw ToleranceTooSmallError(batch.size(), 0.0);
      kernel = kernel.with_scale(mad_scale(pilot));
    }
    return select_by_proportion(batch, summary_distances(batch, s_obs, kernel), q->proportion);
  }
  ParticleSet set = select_by_kernel(batch, summary_distances(batch, s_obs, config.kernel), config.kernel);
  if (set.empty()) throw ToleranceTooSmallError(set.attempts, config.kernel.epsilon());
  return set;
}

void assign_importance_weights(ParticleSet& particles, const ProposalDistribution& prior,
                               const ProposalDistribution& proposal) {
  if (!prior.log_density || !proposal.log_density) {
    throw InvalidArgument("importance weights need both log densities");
  }
  bool any_positive = false;
  for (auto& p : particles.particles) {
    const double log_w = prior.log_density(p.theta) - proposal.log_density(p.theta);
    double w = std::isnan(log_w) ? 0.0 : std::exp(log_w);
    if (!std::isfinite(w)) w = 0.0;
    p.weight = w;
    any_positive = any_positive || w > 0.0;
  }
  if (!any_positive) {
    throw SupportMismatchError(
        "all importance weights are zero or non-finite; the prior does not cover the proposals");
  }
}

namespace {

ParticleSet run_rejection(const GenerativeModel& model, const ProposalDistribution& proposal,
                          const SummaryVector& s_obs, const SamplerConfig& config,
                          std::uint64_t seed) {
  config.validate();
  if (static_cast<std::size_t>(s_obs.size()) != model.summary_dim()) {
    throw InvalidArgument("observed summary dimension does not match the model");
  }
  if (!s_obs.allFinite()) throw InvalidArgument("observed summary is not finite");

  if (const auto* fixed = std::get_if<FixedProposals>(&config.stopping)) {
    const ProposalBatch batch =
        simulate_proposals(model, proposal, 0, fixed->count, seed, config.workers);
    return select_from_batch(batch, s_obs, config);
  }

  const auto& target = std::get<TargetAccepted>(config.stopping);
  const std::size_t cap = target.max_attempts != 0 ? target.max_attempts : 100 * target.count;
  ParticleSet set;
  set.tolerance = config.kernel.epsilon();
  std::size_t next = 0;
  std::size_t chunk = std::max<std::size_t>(target.count, 256);
  while (next < cap) {
    const std::size_t count = std::min(chunk, cap - next);
    const ProposalBatch batch = simulate_proposals(model, proposal, next, count, seed, config.workers);
    const std::vector<double> distances = summary_distances(batch, s_obs, config.kernel);
    for (std::size_t k = 0; k < count; ++k) {
      if (!std::isfinite(distances[k])) continue;
      const double p =
          accept_probability_at_distance(config.kernel.family(), config.kernel.epsilon(), distances[k]);
      if (batch.accept_uniforms[k] < p) {
        set.particles.push_back(make_particle(batch, k));
        if (set.particles.size() == target.count) {
          set.attempts = next + k + 1;
          return set;
        }
      }
    }
    next += count;
    // size the next chunk from the running acceptance rate
    const double rate = static_cast<double>(set.particles.size() + 1) / static_cast<double>(next);
    const double needed = static_cast<double>(target.count - set.particles.size()) / rate;
    chunk = static_cast<std::size_t>(std::clamp(1.2 * needed + 64.0, 256.0, 4.0e6));
  }
  set.attempts = cap;
  if (set.empty()) throw ToleranceTooSmallError(cap, config.kernel.epsilon());
  return set;
}

}  // namespace

ParticleSet abc_reject(const GenerativeModel& model, const ProposalDistribution& prior,
                       const SummaryVector& s_obs, const SamplerConfig& config,
                       std::uint64_t seed) {
  return run_rejection(model, prior, s_obs, config, seed);
}

ParticleSet acc_reject(const GenerativeModel& model, const ProposalDistribution& initial,
                       const SummaryVector& s_obs, const SamplerConfig& config,
                       std::uint64_t seed) {
  return run_rejection(model, initial, s_obs, config, seed);
}

ParticleSet abc_importance(const GenerativeModel& model, const ProposalDistribution& prior,
                           const ProposalDistribution& initial, const SummaryVector& s_obs,
                           const SamplerConfig& config, std::uint64_t seed) {
  ParticleSet set = run_rejection(model, initial, s_obs, config, seed);
  assign_importance_weights(set, prior, initial);
  return set;
}

ProposalDistribution flat_target(std::size_t dim) {
  ProposalDistribution flat;
  flat.dim = dim;
  flat.sample = [](RngStream&) -> ParameterPoint {
    throw InvalidArgument("a flat target cannot be sampled");
  };
  flat.log_density = [](const ParameterPoint&) { return 0.0; };
  return flat;
}

}  // namespace acc
