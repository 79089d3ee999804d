#include "acc/adjustment.hpp"

#include <cmath>
#include <string>

#include "acc/errors.hpp"

namespace acc {

RegressionFit fit_local_linear(const ParticleSet& particles, const SummaryVector& s_obs,
                               const FitOptions& options) {
  if (particles.empty()) throw InvalidArgument("cannot regress on an empty particle set");
  const auto n = static_cast<Eigen::Index>(particles.size());
  const Eigen::Index d = s_obs.size();
  const auto p = static_cast<Eigen::Index>(particles.parameter_dim());
  if (n <= d + 1) {
    throw InvalidArgument("regression needs more than " + std::to_string(d + 1) +
                          " particles, got " + std::to_string(n));
  }

  Eigen::VectorXd w(n);
  Eigen::MatrixXd S(n, d);
  Eigen::MatrixXd T(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Particle& q = particles.particles[static_cast<std::size_t>(i)];
    if (q.summary.size() != d) throw InvalidArgument("summary dimension mismatch");
    w[i] = q.weight;
    S.row(i) = (q.summary - s_obs).transpose();
    T.row(i) = q.theta.transpose();
  }
  const double total = w.sum();
  if (!(total > 0.0)) throw DegenerateSampleError("total particle weight is zero");
  const Eigen::VectorXd wn = w / total;
  const Eigen::RowVectorXd s_bar = wn.transpose() * S;
  const Eigen::RowVectorXd t_bar = wn.transpose() * T;
  const Eigen::MatrixXd Sc = S.rowwise() - s_bar;
  const Eigen::MatrixXd Tc = T.rowwise() - t_bar;
  const Eigen::VectorXd root = wn.array().sqrt();

  Eigen::VectorXd scale(d);
  std::vector<std::size_t> constant;
  for (Eigen::Index j = 0; j < d; ++j) {
    scale[j] = std::sqrt((wn.array() * Sc.col(j).array().square()).sum());
    if (!(scale[j] > 1e-300) || !std::isfinite(scale[j])) {
      constant.push_back(static_cast<std::size_t>(j));
      scale[j] = 1.0;
    }
  }

  RegressionFit fit;
  const Eigen::MatrixXd Z = root.asDiagonal() * (Sc * scale.cwiseInverse().asDiagonal());
  Eigen::MatrixXd normal = Z.transpose() * Z;
  const Eigen::MatrixXd rhs = Z.transpose() * (root.asDiagonal() * Tc);

  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(Z);
  const Eigen::VectorXd sv = svd.singularValues();
  const double condition = sv[d - 1] > 0.0 ? sv[0] / sv[d - 1] : INFINITY;
  if (!constant.empty() || !(condition <= 1e10)) {
    if (!options.allow_ridge) {
      std::vector<std::size_t> columns = constant;
      if (columns.empty()) {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> ranked;
        ranked.setThreshold(1e-10);
        ranked.compute(Z);
        const Eigen::Index rank = ranked.rank();
        for (Eigen::Index k = std::min(rank, d - 1); k < d; ++k) {
          columns.push_back(static_cast<std::size_t>(ranked.colsPermutation().indices()[k]));
        }
      }
      throw SingularDesignError(std::move(columns));
    }
    const double ridge = 1e-8 * std::max(normal.trace(), 1.0) / static_cast<double>(d);
    normal.diagonal().array() += ridge;
    fit.ridge_applied = true;
    fit.warnings.push_back("ill-conditioned regression design (condition " +
                           std::to_string(condition) + "), ridge applied");
  }

  const Eigen::MatrixXd beta_scaled = normal.ldlt().solve(rhs);  // d x p
  const Eigen::MatrixXd beta = scale.cwiseInverse().asDiagonal() * beta_scaled;
  fit.slope = beta.transpose();
  fit.intercept = (t_bar - s_bar * beta).transpose();

  const Eigen::MatrixXd resid = Tc - Sc * beta;
  fit.residual_variance = (resid.array().square().colwise() * wn.array()).colwise().sum().transpose();
  return fit;
}

ParticleSet regression_adjust(const ParticleSet& particles, const RegressionFit& fit,
                              const SummaryVector& s_obs) {
  if (fit.slope.cols() != s_obs.size() ||
      (!particles.empty() && fit.slope.rows() != particles.particles.front().theta.size())) {
    throw InvalidArgument("regression fit does not match the particle dimensions");
  }
  ParticleSet out = particles;
  for (auto& q : out.particles) {
    if (q.summary.size() != s_obs.size()) throw InvalidArgument("summary dimension mismatch");
    q.theta = q.theta - fit.slope * (q.summary - s_obs);
  }
  out.adjusted = true;
  return out;
}

}  // namespace acc
