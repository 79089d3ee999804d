#include "acc/kernels.hpp"

#include <cmath>
#include <numbers>

#include "acc/errors.hpp"
#include "acc/stats.hpp"

namespace acc {

KernelFamily parse_kernel_family(std::string_view name) {
  if (name == "gaussian") return KernelFamily::gaussian;
  if (name == "uniform") return KernelFamily::uniform;
  if (name == "epanechnikov") return KernelFamily::epanechnikov;
  throw ValidationError("unknown kernel family '" + std::string(name) + "'");
}

std::string to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::gaussian: return "gaussian";
    case KernelFamily::uniform: return "uniform";
    case KernelFamily::epanechnikov: return "epanechnikov";
  }
  return "unknown";
}

KernelSpec::KernelSpec(KernelFamily family, double epsilon) : family_(family), epsilon_(epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw InvalidArgument("kernel tolerance must be positive and finite");
  }
}

KernelSpec::KernelSpec(KernelFamily family, double epsilon, const Eigen::MatrixXd& scale)
    : KernelSpec(family, epsilon) {
  if (scale.rows() != scale.cols() || scale.rows() == 0) {
    throw InvalidArgument("kernel scale must be a non-empty square matrix");
  }
  if (!scale.isApprox(scale.transpose(), 1e-12)) {
    throw InvalidArgument("kernel scale must be symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(scale);
  if (llt.info() != Eigen::Success) {
    throw InvalidArgument("kernel scale must be positive definite");
  }
  scale_ = scale;
  scale_inverse_ = llt.solve(Eigen::MatrixXd::Identity(scale.rows(), scale.cols()));
  log_det_scale_ = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

Eigen::MatrixXd KernelSpec::scale(Eigen::Index d) const {
  if (scale_) return *scale_;
  return Eigen::MatrixXd::Identity(d, d);
}

KernelSpec KernelSpec::with_epsilon(double epsilon) const {
  KernelSpec copy = *this;
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw InvalidArgument("kernel tolerance must be positive and finite");
  }
  copy.epsilon_ = epsilon;
  return copy;
}

KernelSpec KernelSpec::with_scale(const Eigen::MatrixXd& scale) const {
  return KernelSpec(family_, epsilon_, scale);
}

double KernelSpec::scaled_norm(const Eigen::VectorXd& u) const {
  if (!u.allFinite()) throw InvalidArgument("non-finite summary difference");
  if (!scale_) return u.norm();
  if (u.size() != scale_->rows()) {
    throw InvalidArgument("summary difference has dimension " + std::to_string(u.size()) +
                          ", kernel expects " + std::to_string(scale_->rows()));
  }
  return std::sqrt(std::max(0.0, u.dot(scale_inverse_ * u)));
}

double accept_probability_at_distance(KernelFamily family, double epsilon, double distance) {
  const double r = distance / epsilon;
  switch (family) {
    case KernelFamily::gaussian: return std::exp(-0.5 * r * r);
    case KernelFamily::uniform: return r <= 1.0 ? 1.0 : 0.0;
    case KernelFamily::epanechnikov: return r < 1.0 ? 1.0 - r * r : 0.0;
  }
  return 0.0;
}

double accept_probability(const KernelSpec& kernel, const Eigen::VectorXd& u) {
  return accept_probability_at_distance(kernel.family(), kernel.epsilon(), kernel.scaled_norm(u));
}

namespace {

double log_unit_ball_volume(double d) {
  return 0.5 * d * std::log(std::numbers::pi) - std::lgamma(0.5 * d + 1.0);
}

}  // namespace

double density(const KernelSpec& kernel, const Eigen::VectorXd& u) {
  const double r = kernel.scaled_norm(u) / kernel.epsilon();
  const double d = static_cast<double>(u.size());
  const Eigen::MatrixXd scale = kernel.scale(u.size());
  const double log_det = std::log(scale.determinant());
  // volume element of the map v -> eps L^{1/2} v
  const double log_jacobian = d * std::log(kernel.epsilon()) + 0.5 * log_det;
  switch (kernel.family()) {
    case KernelFamily::gaussian:
      return std::exp(-0.5 * r * r - 0.5 * d * std::log(2.0 * std::numbers::pi) - log_jacobian);
    case KernelFamily::uniform:
      return r <= 1.0 ? std::exp(-log_unit_ball_volume(d) - log_jacobian) : 0.0;
    case KernelFamily::epanechnikov:
      // c_d (1 - r^2) with c_d = (d + 2) / (2 V_d)
      return r < 1.0 ? (1.0 - r * r) * std::exp(std::log((d + 2.0) / 2.0) -
                                                  log_unit_ball_volume(d) - log_jacobian)
                     : 0.0;
  }
  return 0.0;
}

Eigen::MatrixXd mad_scale(const std::vector<SummaryVector>& pilot) {
  if (pilot.empty()) throw InvalidArgument("empty pilot sample");
  const Eigen::Index d = pilot.front().size();
  Eigen::MatrixXd scale = Eigen::MatrixXd::Zero(d, d);
  std::vector<double> column;
  column.reserve(pilot.size());
  for (Eigen::Index j = 0; j < d; ++j) {
    column.clear();
    for (const auto& s : pilot) {
      if (std::isfinite(s(j))) column.push_back(s(j));
    }
    double spread = column.empty() ? 0.0 : stats::mad(column);
    if (!(spread > 0.0)) spread = stats::standard_deviation(column);
    if (!(spread > 0.0)) spread = 1.0;
    scale(j, j) = spread * spread;
  }
  return scale;
}

}  // namespace acc
