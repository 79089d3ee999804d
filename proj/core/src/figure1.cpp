#include <cmath>
#include <ostream>

#include "acc/errors.hpp"
#include "acc/harness.hpp"
#include "acc/initial.hpp"
#include "acc/kernels.hpp"
#include "acc/samplers.hpp"
#include "acc/stats.hpp"

namespace acc {

Figure1Data emit_figure1_data(const Figure1Config& config) {
  if (config.epsilons.empty()) throw InvalidArgument("figure1 needs at least one epsilon");
  if (config.grid_points < 2) throw InvalidArgument("figure1 needs at least two grid points");
  Figure1Data out;
  const CauchyModel truth(config.n, CauchyUnknown::location, CauchySummary::median, config.theta0, config.tau);
  RngStream data_rng(derive_seed(config.seed, 0), 0);
  out.data = truth.simulate(ParameterPoint::Constant(1, config.theta0), data_rng);

  const double center = stats::median(out.data.observations);
  const double half = config.box_half_width > 0.0
                          ? config.box_half_width
                          : 25.0 * config.tau * std::sqrt(2.0 / static_cast<double>(config.n));
  const ProposalDistribution prior = improper_location(center - half, center + half);
  out.grid.resize(config.grid_points);
  for (std::size_t g = 0; g < config.grid_points; ++g) {
    out.grid[g] = center - half + 2.0 * half * static_cast<double>(g) / static_cast<double>(config.grid_points - 1);
  }
  out.target = cauchy_target_posterior_grid(out.data, config.tau, out.grid);

  const CauchyModel by_mean(config.n, CauchyUnknown::location, CauchySummary::mean, config.theta0, config.tau);
  const CauchyModel by_median(config.n, CauchyUnknown::location, CauchySummary::median, config.theta0, config.tau);
  const SummaryVector s_mean = by_mean.summarize(out.data);
  const SummaryVector s_median = by_median.summarize(out.data);

  auto kde_on_grid = [&](const std::vector<double>& sample) {
    std::vector<ParameterPoint> centers;
    centers.reserve(sample.size());
    for (double x : sample) centers.push_back(ParameterPoint::Constant(1, x));
    const KdeEstimate kde(centers, kde_bandwidth(centers));
    std::vector<double> density(out.grid.size());
    for (std::size_t g = 0; g < out.grid.size(); ++g) density[g] = kde.density(ParameterPoint::Constant(1, out.grid[g]));
    return density;
  };

  for (std::size_t e = 0; e < config.epsilons.size(); ++e) {
    Figure1Series series;
    series.epsilon = config.epsilons[e];
    SamplerConfig sc;
    sc.stopping = TargetAccepted{config.particles, 2000 * config.particles};
    sc.kernel = KernelSpec(KernelFamily::gaussian, series.epsilon);
    sc.workers = config.workers;
    const ParticleSet mean_set = abc_reject(by_mean, prior, s_mean, sc, derive_seed(config.seed, 10 + 2 * e));
    const ParticleSet median_set = abc_reject(by_median, prior, s_median, sc, derive_seed(config.seed, 11 + 2 * e));
    series.mean_particles = mean_set.coordinate(0);
    series.median_particles = median_set.coordinate(0);
    series.mean_attempts = mean_set.attempts;
    series.median_attempts = median_set.attempts;
    series.mean_kde = kde_on_grid(series.mean_particles);
    series.median_kde = kde_on_grid(series.median_particles);
    out.series.push_back(std::move(series));
  }
  return out;
}

void write_figure1_csv(std::ostream& out, const Figure1Data& data) {
  out << "epsilon,theta,target,abc_mean_kde,abc_median_kde\n";
  for (const auto& s : data.series) {
    for (std::size_t g = 0; g < data.grid.size(); ++g) {
      out << format_number(s.epsilon) << ',' << format_number(data.grid[g]) << ',' << format_number(data.target[g])
          << ',' << format_number(s.mean_kde[g]) << ',' << format_number(s.median_kde[g]) << '\n';
    }
  }
}

OracleCheckConfig default_oracle_check() {
  OracleCheckConfig config;
  for (double eps : {0.2, 0.1, 0.05}) {
    for (double mu : {0.0, 0.5}) {
      for (double b : {0.0, 2.0}) config.cases.push_back(OracleCase{100, eps, mu, b});
    }
  }
  return config;
}

std::vector<OracleRow> oracle_check(const OracleCheckConfig& config) {
  if (config.accepted < 2) throw InvalidArgument("oracle check needs at least two accepted draws");
  std::vector<OracleRow> rows;
  for (std::size_t c = 0; c < config.cases.size(); ++c) {
    const OracleCase& oc = config.cases[c];
    const GaussianLocationModel model(oc.n);
    RngStream data_rng(derive_seed(config.seed, 0), oc.n);
    const Dataset data = model.simulate(ParameterPoint::Constant(1, config.theta0), data_rng);
    const SummaryVector s_obs = model.summarize(data);

    const double spread = std::sqrt(1.0 / static_cast<double>(oc.n) + oc.epsilon * oc.epsilon);
    const ProposalDistribution initial = oc.b_n > 0.0
                                             ? normal_proposal(oc.mu_n, oc.b_n)
                                             : improper_location(s_obs[0] - 12.0 * spread, s_obs[0] + 12.0 * spread);
    SamplerConfig sc;
    sc.stopping = TargetAccepted{config.accepted, 1000 * config.accepted};
    sc.kernel = KernelSpec(KernelFamily::gaussian, oc.epsilon);
    sc.workers = config.workers;
    const ParticleSet set = acc_reject(model, initial, s_obs, sc, derive_seed(config.seed, 1 + c));

    OracleRow row;
    row.setting = oc;
    row.s_obs = s_obs[0];
    const GaussianAccMoments closed = gaussian_acc_closed_form(s_obs[0], oc.n, oc.epsilon, oc.mu_n, oc.b_n);
    row.closed_mean = closed.mean;
    row.closed_variance = closed.variance;
    const std::vector<double> values = set.coordinate(0);
    row.sample_mean = stats::mean(values);
    const double sd = stats::standard_deviation(values);
    row.sample_variance = sd * sd;
    row.accepted = set.size();
    row.attempts = set.attempts;
    const double m = static_cast<double>(set.size());
    row.mean_z = std::abs(row.sample_mean - closed.mean) / std::sqrt(closed.variance / m);
    row.variance_z = std::abs(row.sample_variance - closed.variance) / (closed.variance * std::sqrt(2.0 / (m - 1.0)));
    rows.push_back(row);
  }
  return rows;
}

void write_oracle_csv(std::ostream& out, const std::vector<OracleRow>& rows) {
  out << "n,epsilon,mu_n,b_n,s_obs,closed_mean,closed_variance,sample_mean,sample_variance,accepted,attempts,mean_z,"
         "variance_z\n";
  for (const auto& r : rows) {
    out << r.setting.n << ',' << format_number(r.setting.epsilon) << ',' << format_number(r.setting.mu_n) << ','
        << format_number(r.setting.b_n) << ',' << format_number(r.s_obs) << ',' << format_number(r.closed_mean) << ','
        << format_number(r.closed_variance) << ',' << format_number(r.sample_mean) << ','
        << format_number(r.sample_variance) << ',' << r.accepted << ',' << r.attempts << ','
        << format_number(r.mean_z) << ',' << format_number(r.variance_z) << '\n';
  }
}

}  // namespace acc
