#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "acc/kernels.hpp"
#include "acc/types.hpp"

namespace acc {

/// Stop after exactly `count` proposals.
struct FixedProposals {
  std::size_t count = 0;
};

/// Stop once `count` proposals are accepted. max_attempts == 0 means
/// 100 * count.
struct TargetAccepted {
  std::size_t count = 0;
  std::size_t max_attempts = 0;
};

/// Accept proposal i with probability K(u_i/eps)/K(0) at the kernel's eps.
struct FixedEpsilon {};

/// Generate all proposals, set eps to the q-quantile of the distances and keep
/// exactly ceil(q N) proposals with the uniform kernel at that eps. With
/// `standardize` the distance scale is diag(MAD^2) of the simulated summaries.
struct FixedAcceptanceProportion {
  double proportion = 0.1;
  bool standardize = true;
};

struct SamplerConfig {
  std::variant<FixedProposals, TargetAccepted> stopping = FixedProposals{10000};
  KernelSpec kernel{KernelFamily::gaussian, 0.1};
  std::variant<FixedEpsilon, FixedAcceptanceProportion> mode = FixedEpsilon{};
  unsigned workers = 1;

  /// Throws ValidationError on inconsistent settings.
  void validate() const;
};

/// Every proposal of a run, kept so that several tolerances or acceptance
/// proportions can be applied to one simulation pass.
struct ProposalBatch {
  std::vector<ParameterPoint> thetas;
  std::vector<SummaryVector> summaries;
  /// Uniform draw used for the accept decision of each proposal.
  std::vector<double> accept_uniforms;
  /// False where the proposal fell outside the model domain (never simulated).
  std::vector<bool> simulated;

  std::size_t size() const { return thetas.size(); }
};

/// Draws proposals [first, first + count) from `proposal`; proposal i uses
/// substream(seed, i) for its parameter, its dataset and its accept uniform.
ProposalBatch simulate_proposals(const GenerativeModel& model, const ProposalDistribution& proposal,
                                 std::size_t first, std::size_t count, std::uint64_t seed,
                                 unsigned workers);

/// Scaled distances ||s_i - s_obs||_L; +inf for unsimulated proposals.
std::vector<double> summary_distances(const ProposalBatch& batch, const SummaryVector& s_obs,
                                      const KernelSpec& kernel);

/// Keeps the ceil(q N) nearest proposals (ties broken by index). The returned
/// set carries tolerance = the largest kept distance.
ParticleSet select_by_proportion(const ProposalBatch& batch, const std::vector<double>& distances,
                                 double proportion);

/// Kernel accept/reject over a batch at the kernel's epsilon.
ParticleSet select_by_kernel(const ProposalBatch& batch, const std::vector<double>& distances,
                             const KernelSpec& kernel);

/// The accept step of a FixedProposals run applied to an existing batch:
/// quantile selection (with MAD standardization when configured) or kernel
/// accept/reject. Throws ToleranceTooSmallError when nothing is accepted.
ParticleSet select_from_batch(const ProposalBatch& batch, const SummaryVector& s_obs,
                              const SamplerConfig& config);

/// Replaces unit weights with exp(log prior - log proposal).
/// Throws SupportMismatchError when no weight is positive and finite.
void assign_importance_weights(ParticleSet& particles, const ProposalDistribution& prior,
                               const ProposalDistribution& proposal);

/// Accept-reject ABC: proposals from the prior.
ParticleSet abc_reject(const GenerativeModel& model, const ProposalDistribution& prior,
                       const SummaryVector& s_obs, const SamplerConfig& config,
                       std::uint64_t seed);

/// Accept-reject ACC: proposals from a (possibly data-dependent) initial
/// distribution r_n. Identical code path to abc_reject, so r_n = prior with the
/// same seed reproduces abc_reject bit for bit.
ParticleSet acc_reject(const GenerativeModel& model, const ProposalDistribution& initial,
                       const SummaryVector& s_obs, const SamplerConfig& config,
                       std::uint64_t seed);

/// Importance-sampling ABC: proposals from r_n, weights prior / r_n.
ParticleSet abc_importance(const GenerativeModel& model, const ProposalDistribution& prior,
                           const ProposalDistribution& initial, const SummaryVector& s_obs,
                           const SamplerConfig& config, std::uint64_t seed);

struct PmcConfig {
  std::size_t particles_per_iter = 1000;
  /// Strictly decreasing; its length is the number of iterations.
  std::vector<double> epsilon_schedule;
  /// Family and distance scale; epsilon is taken from the schedule.
  KernelSpec kernel{KernelFamily::gaussian, 1.0};
  /// Cap per iteration is max_attempts_factor * particles_per_iter.
  std::size_t max_attempts_factor = 100;
  unsigned workers = 1;
};

struct PmcResult {
  ParticleSet particles;
  /// Gaussian mixture over the final weighted particles.
  ProposalDistribution proposal;
  std::vector<double> ess_history;
  std::vector<std::string> warnings;
};

/// Population Monte Carlo ABC targeting `target_prior` (flat when its
/// log_density is empty). Iteration 1 is abc_importance from
/// `initial`; later iterations propose from a Gaussian mixture over the
/// previous weighted particles with covariance twice their weighted covariance.
PmcResult pmc_refine(const GenerativeModel& model, const ProposalDistribution& initial,
                     const ProposalDistribution& target_prior, const SummaryVector& s_obs,
                     const PmcConfig& config, std::uint64_t seed);

/// A flat, unnormalized target used by pmc_refine's default.
ProposalDistribution flat_target(std::size_t dim);

}  // namespace acc
