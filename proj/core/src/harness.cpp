#include "acc/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <ostream>

#include "acc/adjustment.hpp"
#include "acc/errors.hpp"
#include "acc/initial.hpp"
#include "acc/kernels.hpp"
#include "acc/parallel.hpp"
#include "acc/samplers.hpp"
#include "acc/stats.hpp"

namespace acc {

std::unique_ptr<GenerativeModel> make_model(const ModelSpec& spec) {
  if (spec.name == "gaussian") return std::make_unique<GaussianLocationModel>(spec.n);
  if (spec.name == "cauchy") {
    return std::make_unique<CauchyModel>(spec.n, parse_cauchy_unknown(spec.unknown),
                                         parse_cauchy_summary(spec.summary), spec.known_location,
                                         spec.known_scale);
  }
  if (spec.name == "ricker") return std::make_unique<RickerModel>(spec.n, spec.burn_in);
  throw ValidationError("unknown model '" + spec.name + "'");
}

std::vector<std::string> parameter_names(const ModelSpec& spec) {
  if (spec.name == "ricker") return {"log_r", "log_sigma", "log_phi"};
  if (spec.name == "cauchy") {
    switch (parse_cauchy_unknown(spec.unknown)) {
      case CauchyUnknown::location: return {"theta"};
      case CauchyUnknown::scale: return {"tau"};
      case CauchyUnknown::joint: return {"theta", "tau"};
    }
  }
  return {"theta"};
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <class Fn>
auto staged(const std::string& stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ValidationError&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(stage + ": " + e.what());
  }
}

enum class Coordinate { location, scale, other };

std::vector<Coordinate> coordinate_roles(const ModelSpec& spec) {
  if (spec.name == "cauchy") {
    switch (parse_cauchy_unknown(spec.unknown)) {
      case CauchyUnknown::location: return {Coordinate::location};
      case CauchyUnknown::scale: return {Coordinate::scale};
      case CauchyUnknown::joint: return {Coordinate::location, Coordinate::scale};
    }
  }
  if (spec.name == "gaussian") return {Coordinate::location};
  return {Coordinate::other, Coordinate::other, Coordinate::other};
}

double location_estimate(const ModelSpec& spec, const Dataset& data) {
  return spec.name == "gaussian" ? stats::mean(data.observations) : stats::median(data.observations);
}

// flat on the natural positive scale, written in log coordinates
ProposalDistribution log_scale_flat(std::size_t dim) {
  ProposalDistribution out;
  out.dim = dim;
  out.sample = [](RngStream&) -> ParameterPoint {
    throw InvalidArgument("an unbounded flat prior cannot be sampled");
  };
  out.log_density = [](const ParameterPoint& theta) { return theta.sum(); };
  return out;
}

ProposalDistribution improper_distribution(const DistributionSpec& spec, const ModelSpec& model,
                                           const Dataset& data) {
  const auto roles = coordinate_roles(model);
  if (model.name == "ricker") {
    if (spec.kind != "flat") throw ValidationError("the Ricker model supports flat improper priors only");
    return log_scale_flat(roles.size());
  }
  Box box{Eigen::VectorXd(static_cast<Eigen::Index>(roles.size())),
          Eigen::VectorXd(static_cast<Eigen::Index>(roles.size()))};
  std::vector<BoxCoordinate> kinds;
  for (std::size_t j = 0; j < roles.size(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    if (roles[j] == Coordinate::location) {
      if (spec.kind == "one_over_sigma") throw ValidationError("1/sigma needs a scale parameter");
      if (spec.box_half_width > 0.0) {
        const double c = location_estimate(model, data);
        box.lower[jj] = c - spec.box_half_width;
        box.upper[jj] = c + spec.box_half_width;
      } else {
        std::tie(box.lower[jj], box.upper[jj]) = location_box(data, spec.box_multiple);
      }
      kinds.push_back(BoxCoordinate::flat);
    } else {
      std::tie(box.lower[jj], box.upper[jj]) = scale_box(data, spec.scale_factor);
      kinds.push_back(spec.kind == "flat" ? BoxCoordinate::flat : BoxCoordinate::reciprocal);
    }
  }
  return improper_box(box, kinds);
}

PointEstimator make_estimator(const DistributionSpec& spec, const ExperimentConfig& config,
                              const GenerativeModel& model) {
  const std::size_t p = model.parameter_dim();
  Eigen::VectorXd offset = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
  if (!spec.estimator_offset.empty()) {
    if (spec.estimator_offset.size() != p) throw ValidationError("estimator_offset has the wrong length");
    for (std::size_t j = 0; j < p; ++j) offset[static_cast<Eigen::Index>(j)] = spec.estimator_offset[j];
  }
  auto scalar = [p](const std::string& name) {
    if (p != 1) throw ValidationError("estimator '" + name + "' gives one value but the model has " +
                                      std::to_string(p) + " parameters");
  };
  const std::string& name = spec.estimator;
  if (name == "median") {
    scalar(name);
    return [offset](const Dataset& d, RngStream&) {
      return ParameterPoint(ParameterPoint::Constant(1, stats::median(d.observations)) + offset);
    };
  }
  if (name == "mad") {
    scalar(name);
    return [offset](const Dataset& d, RngStream&) {
      return ParameterPoint(ParameterPoint::Constant(1, stats::mad(d.observations)) + offset);
    };
  }
  if (name == "mean") {
    scalar(name);
    return [offset](const Dataset& d, RngStream&) {
      return ParameterPoint(ParameterPoint::Constant(1, stats::mean(d.observations)) + offset);
    };
  }
  if (name == "median_mad") {
    if (p != 2) throw ValidationError("estimator 'median_mad' needs a two-parameter model");
    return [offset](const Dataset& d, RngStream&) {
      ParameterPoint t(2);
      t << stats::median(d.observations), stats::mad(d.observations);
      return ParameterPoint(t + offset);
    };
  }
  if (name == "msl") {
    if (config.model.name != "ricker") throw ValidationError("estimator 'msl' is for the Ricker model");
    const SyntheticLikelihoodConfig sl = config.synthetic;
    const std::size_t burn_in = config.model.burn_in;
    return [offset, sl, burn_in](const Dataset& d, RngStream& rng) {
      const auto local = RickerModel(d.size(), burn_in).bind(d);
      const SummaryVector s = local->summarize(d);
      const double level = std::max(stats::mean(d.observations), 0.5);
      ParameterPoint start(3);
      start << 3.5, std::log(0.5), std::log(level / 3.5);
      const MslResult fit = max_synthetic_likelihood(*local, s, start, sl, derive_seed(rng.seed(), rng.index()));
      return ParameterPoint(fit.estimate + offset);
    };
  }
  throw ValidationError("unknown estimator '" + name + "'");
}

struct Built {
  ProposalDistribution dist;
  std::vector<std::string> warnings;
};

Built build_distribution(const DistributionSpec& spec, const ExperimentConfig& config,
                         const GenerativeModel& model, const Dataset& data, std::uint64_t seed) {
  const std::string& kind = spec.kind;
  if (kind == "flat" || kind == "one_over_sigma" || kind == "location_scale") {
    return {improper_distribution(spec, config.model, data), {}};
  }
  if (kind == "normal") {
    if (model.parameter_dim() != 1) throw ValidationError("normal distributions are one-dimensional");
    return {normal_proposal(spec.mu, spec.b), {}};
  }
  if (kind == "student_t") {
    if (model.parameter_dim() != 1) throw ValidationError("t distributions are one-dimensional");
    return {student_t_proposal(spec.df, spec.location, spec.scale), {}};
  }
  MinibatchConfig mb;
  mb.nu = spec.nu;
  mb.subset_size = spec.subset_size;
  mb.batches = spec.batches;
  mb.policy = spec.policy == "auto" ? (data.size() >= 100 ? OverlapPolicy::disjoint : OverlapPolicy::overlapping)
                                    : parse_overlap_policy(spec.policy);
  mb.stride = spec.stride;
  mb.estimator = make_estimator(spec, config, model);
  mb.workers = 1;
  std::vector<std::string> warnings;
  if (spec.subset_size == 0 && spec.nu >= 0.6) warnings.push_back("minibatch exponent nu >= 3/5");
  if (kind == "minibatch") return {minibatch_rn(data, mb, seed).as_proposal(), warnings};
  if (kind == "refined_minibatch") {
    RefineConfig rc;
    rc.particles = spec.refine_particles;
    rc.iterations = spec.refine_iterations;
    rc.initial_quantile = spec.refine_initial_quantile;
    rc.final_quantile = spec.refine_final_quantile;
    rc.kernel = parse_kernel_family(config.sampler.kernel);
    rc.workers = 1;
    RefinedMinibatch refined = refined_minibatch_rn(data, mb, model, rc, seed);
    for (auto& w : refined.warnings) warnings.push_back(std::move(w));
    return {refined.kde.as_proposal(), warnings};
  }
  throw ValidationError("unsupported distribution kind '" + kind + "'");
}

ParticleSet coordinate_set(const ParticleSet& set, std::size_t j) {
  ParticleSet out;
  out.attempts = set.attempts;
  out.tolerance = set.tolerance;
  out.adjusted = set.adjusted;
  out.particles.reserve(set.size());
  for (const auto& p : set.particles) {
    out.particles.push_back(Particle{ParameterPoint::Constant(1, p.theta[static_cast<Eigen::Index>(j)]), p.summary, p.weight});
  }
  return out;
}

bool use_depth(const ExperimentConfig& config, std::size_t p) {
  if (config.region == "depth") return true;
  if (config.region == "intervals") return false;
  return p > 1 && config.model.name == "cauchy";
}

}  // namespace

SingleRunResult run_single(const ExperimentConfig& config, const Dataset& data, std::uint64_t seed) {
  config.validate();
  SingleRunResult result;
  const auto base = make_model(config.model);
  if (data.size() != config.model.n) {
    throw InvalidArgument("dataset has " + std::to_string(data.size()) + " observations, expected " +
                          std::to_string(config.model.n));
  }
  const auto model = base->bind(data);
  result.s_obs = staged("summary", [&] { return model->summarize(data); });
  if (!result.s_obs.allFinite()) throw DegenerateSampleError("observed summary is not finite");
  const std::size_t p = model->parameter_dim();

  bool need_initial = false;
  bool need_prior = false;
  for (const auto& m : config.methods) {
    need_initial = need_initial || m.algorithm != "r-abc";
    need_prior = need_prior || m.algorithm != "r-acc";
  }
  const bool initial_is_prior = config.initial.kind == "prior";
  need_prior = need_prior || (need_initial && initial_is_prior);

  std::optional<ProposalDistribution> prior;
  std::optional<ProposalDistribution> initial;
  if (need_prior) {
    Built b = staged("prior", [&] { return build_distribution(config.prior, config, *model, data, derive_seed(seed, 1)); });
    prior = b.dist;
  }
  if (need_initial) {
    if (initial_is_prior) {
      initial = prior;
    } else {
      Built b = staged("initial distribution",
                       [&] { return build_distribution(config.initial, config, *model, data, derive_seed(seed, 1)); });
      initial = b.dist;
      for (auto& w : b.warnings) result.warnings.push_back("initial distribution: " + w);
    }
  }

  const KernelFamily family = parse_kernel_family(config.sampler.kernel);
  const bool by_proportion = !config.sampler.acceptance.empty();
  const std::vector<double>& tolerances = by_proportion ? config.sampler.acceptance : config.sampler.epsilons;
  const bool fixed_count = by_proportion || config.sampler.target_accepted == 0;
  const std::uint64_t sample_seed = derive_seed(seed, 2);

  std::optional<ProposalBatch> initial_batch;
  std::optional<ProposalBatch> prior_batch;
  if (fixed_count) {
    bool want_prior_batch = false;
    for (const auto& m : config.methods) want_prior_batch = want_prior_batch || m.algorithm == "r-abc";
    if (need_initial) {
      initial_batch = staged("sampling", [&] {
        return simulate_proposals(*model, *initial, 0, config.sampler.n_proposals, sample_seed, 1);
      });
    }
    if (want_prior_batch) {
      prior_batch = staged("sampling", [&] {
        return simulate_proposals(*model, *prior, 0, config.sampler.n_proposals, sample_seed, 1);
      });
    }
  }

  for (double tol : tolerances) {
    SamplerConfig sc;
    sc.workers = 1;
    if (by_proportion) {
      sc.stopping = FixedProposals{config.sampler.n_proposals};
      sc.kernel = KernelSpec(family, 1.0);
      sc.mode = FixedAcceptanceProportion{tol, true};
    } else {
      sc.kernel = KernelSpec(family, tol);
      sc.mode = FixedEpsilon{};
      if (fixed_count) {
        sc.stopping = FixedProposals{config.sampler.n_proposals};
      } else {
        sc.stopping = TargetAccepted{config.sampler.target_accepted, config.sampler.max_attempts};
      }
    }

    for (const auto& method : config.methods) {
      const std::string label = method.algorithm + (method.adjust ? " adjusted" : "");
      MethodRun run;
      run.algorithm = method.algorithm;
      run.adjusted = method.adjust;
      run.acceptance_target = by_proportion ? tol : kNaN;
      run.particles = staged("sampling (" + label + ")", [&] {
        if (fixed_count) {
          const ProposalBatch& batch = method.algorithm == "r-abc" ? *prior_batch : *initial_batch;
          ParticleSet set = select_from_batch(batch, result.s_obs, sc);
          if (method.algorithm == "is-abc") assign_importance_weights(set, *prior, *initial);
          return set;
        }
        if (method.algorithm == "r-abc") return abc_reject(*model, *prior, result.s_obs, sc, sample_seed);
        if (method.algorithm == "r-acc") return acc_reject(*model, *initial, result.s_obs, sc, sample_seed);
        return abc_importance(*model, *prior, *initial, result.s_obs, sc, sample_seed);
      });
      run.epsilon = run.particles.tolerance;
      run.unadjusted_variance = weighted_variance(run.particles);
      run.adjusted_variance = run.unadjusted_variance;

      ParticleSet used = run.particles;
      if (method.adjust) {
        used = staged("regression adjustment (" + label + ")", [&] {
          const RegressionFit fit = fit_local_linear(run.particles, result.s_obs, FitOptions{true});
          for (const auto& w : fit.warnings) result.warnings.push_back(label + ": " + w);
          return regression_adjust(run.particles, fit, result.s_obs);
        });
        run.adjusted_variance = weighted_variance(used);
      }

      const bool reflected =
          method.interval == "reflected" || (method.interval == "auto" && method.algorithm != "is-abc");
      run.regions = staged("confidence regions (" + label + ")", [&] {
        std::vector<std::vector<ConfidenceRegion>> regions;
        for (std::size_t a = 0; a < config.alphas.size(); ++a) {
          const double alpha = config.alphas[a];
          std::vector<ConfidenceRegion> per_alpha;
          if (use_depth(config, p)) {
            const ParameterPoint center = weighted_mean(used);
            auto estimator = [center](const SummaryVector&) { return center; };
            const MatchingMaps maps = reflected ? MatchingMaps::location(estimator) : MatchingMaps::centered(estimator);
            DepthRegionOptions options;
            options.volume_seed = derive_seed(seed, 3);
            per_alpha.push_back(depth_region(used, maps, result.s_obs, alpha, options));
          } else {
            for (std::size_t j = 0; j < p; ++j) {
              const ParticleSet coord = coordinate_set(used, j);
              const ParameterPoint center = weighted_mean(coord);
              auto estimator = [center](const SummaryVector&) { return center; };
              const MatchingMaps maps =
                  reflected ? MatchingMaps::location(estimator) : MatchingMaps::centered(estimator);
              per_alpha.push_back(
                  interval_from_w(coord, maps, result.s_obs, alpha, Sidedness::two_sided_central));
            }
          }
          regions.push_back(std::move(per_alpha));
        }
        return regions;
      });

      run.oracle_mean = kNaN;
      run.oracle_variance = kNaN;
      run.sample_mean = kNaN;
      run.sample_variance = kNaN;
      if (config.oracle) {
        double mu = 0.0;
        double b = 0.0;
        const DistributionSpec& r =
            method.algorithm == "r-abc" || initial_is_prior ? config.prior : config.initial;
        if (r.kind == "normal") {
          mu = r.mu;
          b = r.b;
        }
        const GaussianAccMoments closed =
            gaussian_acc_closed_form(result.s_obs[0], config.model.n, run.epsilon, mu, b);
        run.oracle_mean = closed.mean;
        run.oracle_variance = closed.variance;
        run.sample_mean = weighted_mean(run.particles)[0];
        run.sample_variance = run.unadjusted_variance[0];
      }
      result.runs.push_back(std::move(run));
    }
  }
  return result;
}

Dataset replicate_dataset(const ExperimentConfig& config, std::size_t index) {
  const auto model = make_model(config.model);
  ParameterPoint theta0(static_cast<Eigen::Index>(config.model.theta0.size()));
  for (std::size_t j = 0; j < config.model.theta0.size(); ++j) {
    theta0[static_cast<Eigen::Index>(j)] = config.model.theta0[j];
  }
  RngStream rng(derive_seed(config.seed, 0xDA7A), index);
  return model->simulate(theta0, rng);
}

namespace {

struct RunDigest {
  std::vector<std::vector<char>> contains;   // [alpha][region]
  std::vector<std::vector<double>> sizes;    // [alpha][region]
  std::size_t attempts = 0;
  std::size_t accepted = 0;
  double epsilon = 0.0;
  Eigen::VectorXd unadjusted_variance;
  Eigen::VectorXd adjusted_variance;
  bool adjusted = false;
};

struct DatasetDigest {
  bool ok = false;
  std::string error;
  std::vector<RunDigest> runs;
};

}  // namespace

CoverageReport run_coverage(const ExperimentConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  ParameterPoint theta0(static_cast<Eigen::Index>(config.model.theta0.size()));
  for (std::size_t j = 0; j < config.model.theta0.size(); ++j) {
    theta0[static_cast<Eigen::Index>(j)] = config.model.theta0[j];
  }
  const std::size_t m = config.replications;
  std::vector<DatasetDigest> digests(m);
  const std::uint64_t run_seed = derive_seed(config.seed, 1);

  parallel_for(m, config.workers, [&](std::size_t i) {
    DatasetDigest& out = digests[i];
    try {
      const Dataset data = replicate_dataset(config, i);
      const SingleRunResult r = run_single(config, data, derive_seed(run_seed, i));
      for (const auto& run : r.runs) {
        RunDigest d;
        d.attempts = run.particles.attempts;
        d.accepted = run.particles.size();
        d.epsilon = run.epsilon;
        d.unadjusted_variance = run.unadjusted_variance;
        d.adjusted_variance = run.adjusted_variance;
        d.adjusted = run.adjusted;
        for (const auto& per_alpha : run.regions) {
          std::vector<char> hits;
          std::vector<double> sizes;
          for (const auto& region : per_alpha) {
            if (region.kind() == RegionKind::depth_contour) {
              hits.push_back(region.contains(theta0) ? 1 : 0);
            } else {
              const auto j = static_cast<Eigen::Index>(hits.size());
              hits.push_back(region.contains(theta0[j]) ? 1 : 0);
            }
            sizes.push_back(region.size());
          }
          d.contains.push_back(std::move(hits));
          d.sizes.push_back(std::move(sizes));
        }
        out.runs.push_back(std::move(d));
      }
      out.ok = true;
    } catch (const std::exception& e) {
      out.ok = false;
      out.error = "dataset " + std::to_string(i) + ": " + e.what();
    }
  });

  CoverageReport report;
  std::vector<const DatasetDigest*> good;
  for (const auto& d : digests) {
    if (d.ok) {
      good.push_back(&d);
    } else {
      ++report.failures;
      report.failure_messages.push_back(d.error);
    }
  }
  report.failed = static_cast<double>(report.failures) > 0.05 * static_cast<double>(m);
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  for (const auto* d : good) {
    for (const auto& run : d->runs) {
      report.total_attempts += run.attempts;
      if (!run.adjusted) continue;
      for (Eigen::Index j = 0; j < run.adjusted_variance.size(); ++j) {
        ++report.variance_checks;
        if (run.adjusted_variance[j] > run.unadjusted_variance[j] * (1.0 + 1e-9)) ++report.variance_violations;
      }
    }
  }
  if (good.empty()) return report;

  const auto names = parameter_names(config.model);
  const bool by_proportion = !config.sampler.acceptance.empty();
  const std::vector<double>& tolerances = by_proportion ? config.sampler.acceptance : config.sampler.epsilons;
  const std::size_t runs_per_dataset = good.front()->runs.size();
  for (std::size_t k = 0; k < runs_per_dataset; ++k) {
    const std::size_t t = k / config.methods.size();
    const MethodSpec& method = config.methods[k % config.methods.size()];
    std::size_t attempts = 0;
    std::size_t accepted = 0;
    std::vector<double> eps;
    for (const auto* d : good) {
      attempts += d->runs[k].attempts;
      accepted += d->runs[k].accepted;
      eps.push_back(d->runs[k].epsilon);
    }
    const RunDigest& first = good.front()->runs[k];
    for (std::size_t a = 0; a < first.contains.size(); ++a) {
      for (std::size_t r = 0; r < first.contains[a].size(); ++r) {
        ResultRow row;
        row.setting = config.setting;
        row.method = method.algorithm;
        row.adjusted = method.adjust;
        row.parameter = first.contains[a].size() == 1 && names.size() > 1 ? "joint" : names[r];
        row.acceptance = by_proportion ? tolerances[t] : kNaN;
        row.epsilon = by_proportion ? stats::median(eps) : tolerances[t];
        row.level = 1.0 - config.alphas[a];
        std::size_t hits = 0;
        std::vector<double> sizes;
        for (const auto* d : good) {
          hits += static_cast<std::size_t>(d->runs[k].contains[a][r]);
          sizes.push_back(d->runs[k].sizes[a][r]);
        }
        row.coverage = static_cast<double>(hits) / static_cast<double>(good.size());
        row.median_size = stats::median(sizes);
        row.replications = good.size();
        row.failures = report.failures;
        row.attempts = attempts;
        row.accepted = accepted;
        row.wall_seconds = report.wall_seconds;
        report.rows.push_back(std::move(row));
      }
    }
  }
  return report;
}

std::string format_number(double value) {
  if (std::isnan(value)) return "NA";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

void write_result_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << "setting,method,adjusted,parameter,acceptance,epsilon,level,coverage,median_size,replications,failures,"
         "attempts,accepted\n";
  for (const auto& r : rows) {
    out << r.setting << ',' << r.method << ',' << (r.adjusted ? 1 : 0) << ',' << r.parameter << ','
        << format_number(r.acceptance) << ',' << format_number(r.epsilon) << ',' << format_number(r.level) << ','
        << format_number(r.coverage) << ',' << format_number(r.median_size) << ',' << r.replications << ','
        << r.failures << ',' << r.attempts << ',' << r.accepted << '\n';
  }
}

void write_timing_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << "setting,method,adjusted,parameter,acceptance,epsilon,level,wall_seconds\n";
  for (const auto& r : rows) {
    out << r.setting << ',' << r.method << ',' << (r.adjusted ? 1 : 0) << ',' << r.parameter << ','
        << format_number(r.acceptance) << ',' << format_number(r.epsilon) << ',' << format_number(r.level) << ','
        << format_number(r.wall_seconds) << '\n';
  }
}

void write_run_csv(std::ostream& out, const ExperimentConfig& config, const SingleRunResult& result) {
  const auto names = parameter_names(config.model);
  out << "setting,method,adjusted,parameter,acceptance,epsilon,level,kind,lo,hi,size,particles,attempts,record";
  if (config.oracle) out << ",oracle_mean,oracle_variance,sample_mean,sample_variance";
  out << '\n';
  for (const auto& run : result.runs) {
    for (std::size_t a = 0; a < run.regions.size(); ++a) {
      for (std::size_t r = 0; r < run.regions[a].size(); ++r) {
        const ConfidenceRegion& region = run.regions[a][r];
        const bool joint = region.kind() == RegionKind::depth_contour;
        out << config.setting << ',' << run.algorithm << ',' << (run.adjusted ? 1 : 0) << ','
            << (joint ? std::string("joint") : names[r]) << ',' << format_number(run.acceptance_target) << ','
            << format_number(run.epsilon) << ',' << format_number(region.level()) << ',' << to_string(region.kind())
            << ',' << format_number(joint ? kNaN : region.lo()) << ',' << format_number(joint ? kNaN : region.hi())
            << ',' << format_number(region.size()) << ',' << run.particles.size() << ',' << run.particles.attempts
            << ',' << region.to_record();
        if (config.oracle) {
          out << ',' << format_number(run.oracle_mean) << ',' << format_number(run.oracle_variance) << ','
              << format_number(run.sample_mean) << ',' << format_number(run.sample_variance);
        }
        out << '\n';
      }
    }
  }
}

}  // namespace acc
