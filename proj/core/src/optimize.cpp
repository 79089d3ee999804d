#include "acc/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace acc {

NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& objective,
                             const Eigen::VectorXd& start, const Eigen::VectorXd& step,
                             std::size_t max_evaluations, double tolerance) {
  NelderMeadResult result;
  result.argmin = start;
  result.value = std::numeric_limits<double>::infinity();
  if (max_evaluations == 0) return result;

  const Eigen::Index dim = start.size();
  std::size_t evaluations = 0;
  auto eval = [&](const Eigen::VectorXd& x) {
    ++evaluations;
    const double v = objective(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  std::vector<Eigen::VectorXd> simplex;
  std::vector<double> values;
  simplex.push_back(start);
  values.push_back(eval(start));
  for (Eigen::Index j = 0; j < dim && evaluations < max_evaluations; ++j) {
    Eigen::VectorXd vertex = start;
    vertex(j) += step(j);
    simplex.push_back(vertex);
    values.push_back(eval(vertex));
  }
  if (simplex.size() < static_cast<std::size_t>(dim + 1)) {
    const auto best = static_cast<std::size_t>(
        std::min_element(values.begin(), values.end()) - values.begin());
    result.argmin = simplex[best];
    result.value = values[best];
    result.evaluations = evaluations;
    return result;
  }

  std::vector<std::size_t> order(simplex.size());
  while (evaluations < max_evaluations) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second_worst = order[order.size() - 2];

    const double spread = std::abs(values[worst] - values[best]);
    if (spread <= tolerance * (std::abs(values[best]) + tolerance)) {
      result.converged = true;
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim);
    for (std::size_t i = 0; i < simplex.size(); ++i) {
      if (i != worst) centroid += simplex[i];
    }
    centroid /= static_cast<double>(dim);

    const Eigen::VectorXd reflected = centroid + (centroid - simplex[worst]);
    const double f_reflected = eval(reflected);
    if (f_reflected < values[best]) {
      if (evaluations >= max_evaluations) {
        simplex[worst] = reflected;
        values[worst] = f_reflected;
        break;
      }
      const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - simplex[worst]);
      const double f_expanded = eval(expanded);
      if (f_expanded < f_reflected) {
        simplex[worst] = expanded;
        values[worst] = f_expanded;
      } else {
        simplex[worst] = reflected;
        values[worst] = f_reflected;
      }
      continue;
    }
    if (f_reflected < values[second_worst]) {
      simplex[worst] = reflected;
      values[worst] = f_reflected;
      continue;
    }
    if (evaluations >= max_evaluations) break;
    const bool outside = f_reflected < values[worst];
    const Eigen::VectorXd contracted =
        outside ? Eigen::VectorXd(centroid + 0.5 * (reflected - centroid))
                : Eigen::VectorXd(centroid + 0.5 * (simplex[worst] - centroid));
    const double f_contracted = eval(contracted);
    if (f_contracted < std::min(f_reflected, values[worst])) {
      simplex[worst] = contracted;
      values[worst] = f_contracted;
      continue;
    }
    // shrink toward the best vertex
    for (std::size_t i = 0; i < simplex.size() && evaluations < max_evaluations; ++i) {
      if (i == best) continue;
      simplex[i] = simplex[best] + 0.5 * (simplex[i] - simplex[best]);
      values[i] = eval(simplex[i]);
    }
  }

  const auto best = static_cast<std::size_t>(
      std::min_element(values.begin(), values.end()) - values.begin());
  result.argmin = simplex[best];
  result.value = values[best];
  result.evaluations = evaluations;
  return result;
}

}  // namespace acc
