#include "acc/models.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "acc/errors.hpp"
#include "acc/stats.hpp"

namespace acc {

GaussianLocationModel::GaussianLocationModel(std::size_t n) : n_(n) {
  if (n == 0) throw InvalidArgument("sample size must be positive");
}

bool GaussianLocationModel::in_domain(const ParameterPoint& theta) const {
  return theta.size() == 1 && std::isfinite(theta[0]);
}

Dataset GaussianLocationModel::simulate(const ParameterPoint& theta, RngStream& rng) const {
  if (!in_domain(theta)) throw DomainError("gaussian mean must be a finite scalar");
  Dataset data;
  data.observations.resize(n_);
  for (double& x : data.observations) x = theta[0] + rng.normal();
  return data;
}

SummaryVector GaussianLocationModel::summarize(const Dataset& data) const {
  if (data.size() == 0) throw InvalidArgument("empty dataset");
  return SummaryVector::Constant(1, stats::mean(data.observations));
}

std::unique_ptr<GenerativeModel> GaussianLocationModel::bind(const Dataset& observed) const {
  return std::make_unique<GaussianLocationModel>(observed.size());
}

CauchyUnknown parse_cauchy_unknown(const std::string& name) {
  if (name == "location") return CauchyUnknown::location;
  if (name == "scale") return CauchyUnknown::scale;
  if (name == "joint") return CauchyUnknown::joint;
  throw ValidationError("unknown Cauchy parameterization '" + name + "'");
}

CauchySummary parse_cauchy_summary(const std::string& name) {
  if (name == "mean") return CauchySummary::mean;
  if (name == "median") return CauchySummary::median;
  if (name == "mad") return CauchySummary::mad;
  if (name == "median_mad") return CauchySummary::median_mad;
  throw ValidationError("unknown Cauchy summary '" + name + "'");
}

CauchyModel::CauchyModel(std::size_t n, CauchyUnknown unknown, CauchySummary summary,
                         double known_location, double known_scale)
    : n_(n), unknown_(unknown), summary_(summary), known_location_(known_location),
      known_scale_(known_scale) {
  if (n == 0) throw InvalidArgument("sample size must be positive");
  if (!(known_scale > 0.0) || !std::isfinite(known_location)) {
    throw InvalidArgument("Cauchy scale must be positive");
  }
  if (summary_dim() < parameter_dim()) {
    throw InvalidArgument("summary has fewer components than unknown parameters");
  }
}

std::size_t CauchyModel::parameter_dim() const { return unknown_ == CauchyUnknown::joint ? 2 : 1; }

std::size_t CauchyModel::summary_dim() const { return summary_ == CauchySummary::median_mad ? 2 : 1; }

double CauchyModel::location_of(const ParameterPoint& theta) const {
  return unknown_ == CauchyUnknown::scale ? known_location_ : theta[0];
}

double CauchyModel::scale_of(const ParameterPoint& theta) const {
  switch (unknown_) {
    case CauchyUnknown::location: return known_scale_;
    case CauchyUnknown::scale: return theta[0];
    case CauchyUnknown::joint: return theta[1];
  }
  return known_scale_;
}

bool CauchyModel::in_domain(const ParameterPoint& theta) const {
  if (static_cast<std::size_t>(theta.size()) != parameter_dim() || !theta.allFinite()) return false;
  return scale_of(theta) > 0.0;
}

Dataset CauchyModel::simulate(const ParameterPoint& theta, RngStream& rng) const {
  if (!in_domain(theta)) throw DomainError("Cauchy parameters outside the domain");
  const double loc = location_of(theta);
  const double scale = scale_of(theta);
  Dataset data;
  data.observations.resize(n_);
  for (double& x : data.observations) x = loc + scale * std::tan(std::numbers::pi * (rng.uniform() - 0.5));
  return data;
}

SummaryVector CauchyModel::summarize(const Dataset& data) const {
  if (data.size() == 0) throw InvalidArgument("empty dataset");
  const auto& x = data.observations;
  switch (summary_) {
    case CauchySummary::mean: return SummaryVector::Constant(1, stats::mean(x));
    case CauchySummary::median: return SummaryVector::Constant(1, stats::median(x));
    case CauchySummary::mad: return SummaryVector::Constant(1, stats::mad(x));
    case CauchySummary::median_mad: {
      SummaryVector s(2);
      s << stats::median(x), stats::mad(x);
      return s;
    }
  }
  throw InvalidArgument("unknown summary");
}

std::unique_ptr<GenerativeModel> CauchyModel::bind(const Dataset& observed) const {
  return std::make_unique<CauchyModel>(observed.size(), unknown_, summary_, known_location_, known_scale_);
}

GaussianAccMoments gaussian_acc_closed_form(double s_obs, std::size_t n, double epsilon, double mu_n,
                                            double b_n) {
  if (n == 0) throw InvalidArgument("sample size must be positive");
  if (!(epsilon >= 0.0)) throw InvalidArgument("epsilon must be non-negative");
  const double spread = 1.0 / static_cast<double>(n) + epsilon * epsilon;
  const double shrink = 1.0 + b_n * b_n * spread;
  return {(s_obs + b_n * b_n * spread * mu_n) / shrink, spread / shrink};
}

void write_dataset(std::ostream& out, const Dataset& data) {
  out << std::setprecision(17);
  for (double x : data.observations) out << x << '\n';
}

Dataset read_dataset(std::istream& in) {
  Dataset data;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream field(line);
    double x = 0.0;
    if (!(field >> x)) throw InvalidArgument("dataset line " + std::to_string(number) + " is not a number");
    data.observations.push_back(x);
  }
  return data;
}

}  // namespace acc
