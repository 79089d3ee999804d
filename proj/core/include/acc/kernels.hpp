#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "acc/types.hpp"

namespace acc {

enum class KernelFamily { gaussian, uniform, epanechnikov };

KernelFamily parse_kernel_family(std::string_view name);
std::string to_string(KernelFamily family);

/// Smoothing kernel K_eps over summary differences.
///
/// Distances are measured in the norm ||u||_L = sqrt(u' L^{-1} u) where L is
/// a symmetric positive-definite scale matrix; with no matrix supplied L is
/// the identity of whatever dimension u has.
class KernelSpec {
 public:
  KernelSpec(KernelFamily family, double epsilon);
  KernelSpec(KernelFamily family, double epsilon, const Eigen::MatrixXd& scale);

  KernelFamily family() const { return family_; }
  double epsilon() const { return epsilon_; }
  bool has_scale() const { return scale_.has_value(); }
  /// Identity of dimension d when no scale was supplied.
  Eigen::MatrixXd scale(Eigen::Index d) const;

  KernelSpec with_epsilon(double epsilon) const;
  KernelSpec with_scale(const Eigen::MatrixXd& scale) const;

  /// ||u||_L. Throws InvalidArgument on a dimension mismatch or non-finite u.
  double scaled_norm(const Eigen::VectorXd& u) const;

 private:
  KernelFamily family_;
  double epsilon_;
  std::optional<Eigen::MatrixXd> scale_;
  Eigen::MatrixXd scale_inverse_;
  double log_det_scale_ = 0.0;
};

/// Acceptance probability K(u/eps)/K(0).
///
/// The raw kernel density eps^-1 K(u/eps) is not a probability for small eps;
/// dividing by the mode keeps the maximum at exactly 1 and leaves the
/// distribution of accepted draws unchanged.
double accept_probability(const KernelSpec& kernel, const Eigen::VectorXd& u);

/// Same as accept_probability for a precomputed distance ||u||_L.
double accept_probability_at_distance(KernelFamily family, double epsilon, double distance);

/// Normalized density of K_eps on R^d at u.
double density(const KernelSpec& kernel, const Eigen::VectorXd& u);

/// diag(MAD_j^2) of a pilot set of summaries. Components whose MAD is zero
/// fall back to the standard deviation, then to 1.
Eigen::MatrixXd mad_scale(const std::vector<SummaryVector>& pilot);

}  // namespace acc
