#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "acc/types.hpp"

namespace acc {

/// Weighted least-squares fit of theta_i = alpha + beta (s_i - s_obs) + e_i.
struct RegressionFit {
  ParameterPoint intercept;        // p
  Eigen::MatrixXd slope;           // p x d
  Eigen::VectorXd residual_variance;  // p, weighted
  bool ridge_applied = false;
  std::vector<std::string> warnings;
};

struct FitOptions {
  /// On an ill-conditioned design (condition number > 1e10) add
  /// 1e-8 * trace / d to the normal matrix instead of failing.
  bool allow_ridge = false;
};

/// Throws SingularDesignError naming the offending summary columns when the
/// centered design is rank deficient (and ridge is not allowed), and
/// InvalidArgument when there are not more than d + 1 particles.
RegressionFit fit_local_linear(const ParticleSet& particles, const SummaryVector& s_obs,
                               const FitOptions& options = {});

/// theta_i - beta (s_i - s_obs) for every particle; summaries and weights are
/// unchanged and the result is flagged adjusted.
ParticleSet regression_adjust(const ParticleSet& particles, const RegressionFit& fit,
                              const SummaryVector& s_obs);

}  // namespace acc
