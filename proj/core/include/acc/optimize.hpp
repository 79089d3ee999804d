#pragma once

#include <cstddef>
#include <functional>

#include <Eigen/Dense>

namespace acc {

struct NelderMeadResult {
  Eigen::VectorXd argmin;
  double value = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

/// Derivative-free minimization. `step` sets the initial simplex edge per
/// coordinate. With max_evaluations == 0 the start point is returned
/// unevaluated (value = +inf).
NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& objective,
                             const Eigen::VectorXd& start, const Eigen::VectorXd& step,
                             std::size_t max_evaluations, double tolerance = 1e-8);

}  // namespace acc
