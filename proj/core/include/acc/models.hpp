#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "acc/types.hpp"

namespace acc {

/// N(theta, 1) observations summarized by the sample mean.
class GaussianLocationModel final : public GenerativeModel {
 public:
  explicit GaussianLocationModel(std::size_t n);

  std::string name() const override { return "gaussian"; }
  std::size_t parameter_dim() const override { return 1; }
  std::size_t summary_dim() const override { return 1; }
  std::size_t sample_size() const override { return n_; }

  bool in_domain(const ParameterPoint& theta) const override;
  Dataset simulate(const ParameterPoint& theta, RngStream& rng) const override;
  SummaryVector summarize(const Dataset& data) const override;
  std::unique_ptr<GenerativeModel> bind(const Dataset& observed) const override;

 private:
  std::size_t n_;
};

/// Which of (theta, tau) the Cauchy model treats as unknown.
enum class CauchyUnknown { location, scale, joint };
enum class CauchySummary { mean, median, mad, median_mad };

CauchyUnknown parse_cauchy_unknown(const std::string& name);
CauchySummary parse_cauchy_summary(const std::string& name);

/// Cauchy(theta, tau) observations. The parameter vector holds the unknown
/// coordinates only: (theta), (tau) or (theta, tau).
class CauchyModel final : public GenerativeModel {
 public:
  CauchyModel(std::size_t n, CauchyUnknown unknown, CauchySummary summary,
              double known_location = 10.0, double known_scale = 0.55);

  std::string name() const override { return "cauchy"; }
  std::size_t parameter_dim() const override;
  std::size_t summary_dim() const override;
  std::size_t sample_size() const override { return n_; }

  bool in_domain(const ParameterPoint& theta) const override;
  Dataset simulate(const ParameterPoint& theta, RngStream& rng) const override;
  SummaryVector summarize(const Dataset& data) const override;
  std::unique_ptr<GenerativeModel> bind(const Dataset& observed) const override;

  CauchyUnknown unknown() const { return unknown_; }
  CauchySummary summary() const { return summary_; }
  double location_of(const ParameterPoint& theta) const;
  double scale_of(const ParameterPoint& theta) const;

 private:
  std::size_t n_;
  CauchyUnknown unknown_;
  CauchySummary summary_;
  double known_location_;
  double known_scale_;
};

/// Natural-scale Ricker parameters.
struct RickerParams {
  double r = 0.0;
  double sigma = 0.0;
  double phi = 0.0;
};

/// y_t ~ Pois(phi N_t), N_t = r N_{t-1} exp(-N_{t-1} + e_t), e_t ~ N(0, sigma^2).
///
/// The parameter vector is (log r, log sigma, log phi). Each dataset starts
/// from N_0 ~ U(0.5, 1.5), discards `burn_in` steps and records the next n
/// counts. Summaries are the 13-component set described at
/// ricker_wood_summaries, calibrated against the observed series held by the
/// bound model.
class RickerModel final : public GenerativeModel {
 public:
  explicit RickerModel(std::size_t n = 50, std::size_t burn_in = 50);

  std::string name() const override { return "ricker"; }
  std::size_t parameter_dim() const override { return 3; }
  std::size_t summary_dim() const override { return 13; }
  std::size_t sample_size() const override { return n_; }

  bool in_domain(const ParameterPoint& theta) const override;
  Dataset simulate(const ParameterPoint& theta, RngStream& rng) const override;
  SummaryVector summarize(const Dataset& data) const override;
  std::unique_ptr<GenerativeModel> bind(const Dataset& observed) const override;

  /// Latent N_1..N_steps from a given N_0 (sigma may be zero).
  static std::vector<double> latent_path(const RickerParams& params, double n0, std::size_t steps,
                                         RngStream& rng);

  static RickerParams natural(const ParameterPoint& theta);
  static ParameterPoint log_parameters(const RickerParams& params);

  std::size_t burn_in() const { return burn_in_; }

 private:
  std::size_t n_;
  std::size_t burn_in_;
  std::shared_ptr<const std::vector<double>> reference_diffs_;
};

/// The 13 Ricker summaries of a count series y (n >= 6):
///   [0]      mean of y
///   [1]      number of zeros
///   [2..7]   autocovariances at lags 0..5 (1/n normalization)
///   [8..10]  coefficients (linear, quadratic, cubic; no intercept) of the
///            regression of the sorted differences y_t - y_{t-1} on the sorted
///            reference differences
///   [11..12] coefficients of y_{t+1}^0.3 on (y_t^0.3, y_t^0.6), no intercept
/// Rank-deficient regressions return the minimum-norm solution.
SummaryVector ricker_wood_summaries(std::span<const double> y,
                                    std::span<const double> sorted_reference_diffs);

struct GaussianAccMoments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Mean and variance of the normal distribution of accepted draws in the
/// Gaussian location model with r_n = N(mu_n, 1/b_n^2), a Gaussian kernel of
/// standard deviation eps and the sample mean of n observations as summary.
/// b_n = 0 is the flat initial distribution.
GaussianAccMoments gaussian_acc_closed_form(double s_obs, std::size_t n, double epsilon,
                                            double mu_n, double b_n);

struct SyntheticLikelihoodConfig {
  std::size_t replicates = 50;
  std::size_t max_evaluations = 200;
  std::size_t restarts = 2;
  double restart_spread = 0.5;
  double initial_step = 0.3;
};

/// -1/2 (s - mu)' Sigma^-1 (s - mu) - 1/2 log |Sigma|. Throws DomainError
/// when Sigma is not positive definite.
double gaussian_synthetic_loglik(const SummaryVector& s_obs, const Eigen::VectorXd& mean,
                                 const Eigen::MatrixXd& covariance);

/// Simulates `replicates` datasets at theta (replicate j uses
/// substream(seed, j), so one seed gives common random numbers across theta)
/// and evaluates gaussian_synthetic_loglik on their mean and covariance, the
/// latter with a 1e-8 trace / d ridge. Returns -inf when theta is outside the
/// model domain or fewer than d + 2 replicates give finite summaries.
double synthetic_loglik(const ParameterPoint& theta, const SummaryVector& s_obs,
                        const GenerativeModel& model, const SyntheticLikelihoodConfig& config,
                        std::uint64_t seed);

struct MslResult {
  ParameterPoint estimate;
  double loglik = 0.0;
  std::size_t evaluations = 0;
  /// False when no restart improved on its start point.
  bool improved = false;
};

/// Nelder-Mead on -synthetic_loglik with fixed simulation seeds; the best of
/// `restarts` runs from the start and normally perturbed copies of it.
MslResult max_synthetic_likelihood(const GenerativeModel& model, const SummaryVector& s_obs,
                                   const ParameterPoint& start,
                                   const SyntheticLikelihoodConfig& config, std::uint64_t seed);

/// One value per line, 17 significant digits.
void write_dataset(std::ostream& out, const Dataset& data);
Dataset read_dataset(std::istream& in);

}  // namespace acc
