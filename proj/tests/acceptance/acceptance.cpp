// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Usage: acc_acceptance [criterion numbers...]
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "acc/config.hpp"
#include "acc/errors.hpp"
#include "acc/harness.hpp"
#include "acc/initial.hpp"
#include "acc/inference.hpp"
#include "acc/models.hpp"
#include "acc/rng.hpp"
#include "acc/samplers.hpp"
#include "acc/stats.hpp"
#include "oracles.hpp"

using namespace acc;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(4);
  s << x;
  return s.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::filesystem::path out_dir() {
  const char* env = std::getenv("ACC_ACCEPTANCE_OUT");
  std::filesystem::path dir = env ? env : "acceptance_out";
  std::filesystem::create_directories(dir);
  return dir;
}

void save(const std::string& name, const std::string& text) {
  std::ofstream(out_dir() / name) << text;
}

std::string config_path(const std::string& name) {
  return std::string(ACC_SOURCE_DIR) + "/configs/" + name + ".json";
}

std::string result_csv(const CoverageReport& report) {
  std::ostringstream out;
  write_result_csv(out, report.rows);
  return out.str();
}

std::string oracle_csv(const std::vector<OracleRow>& rows) {
  std::ostringstream out;
  write_oracle_csv(out, rows);
  return out.str();
}

std::string figure1_csv(const Figure1Data& data) {
  std::ostringstream out;
  write_figure1_csv(out, data);
  return out.str();
}

// Every artifact produced in this process, so the determinism criterion can
// regenerate and compare it.
struct Artifact {
  std::string text;
  std::function<std::string()> regenerate;
};
std::map<std::string, Artifact> artifacts;

std::map<std::string, CoverageReport> coverage_cache;

const CoverageReport& coverage(const std::string& name) {
  auto it = coverage_cache.find(name);
  if (it != coverage_cache.end()) return it->second;
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentConfig config = load_config(config_path(name));
  CoverageReport report = run_coverage(config);
  std::cerr << "  [" << name << "] " << report.rows.size() << " rows, " << fmt(seconds_since(t0)) << " s, "
            << report.failures << " failures\n";
  const std::string text = result_csv(report);
  save(name + ".csv", text);
  artifacts[name + ".csv"] = {text, [name] { return result_csv(run_coverage(load_config(config_path(name)))); }};
  return coverage_cache.emplace(name, std::move(report)).first->second;
}

const ResultRow* find_row(const CoverageReport& report, const std::string& method, bool adjusted,
                          const std::string& parameter, double acceptance) {
  for (const auto& row : report.rows) {
    if (row.method == method && row.adjusted == adjusted && row.parameter == parameter &&
        std::abs(row.acceptance - acceptance) < 1e-12 && std::abs(row.level - 0.95) < 1e-12) {
      return &row;
    }
  }
  return nullptr;
}

const ResultRow* find_fixed_eps_row(const CoverageReport& report, const std::string& method, double epsilon) {
  for (const auto& row : report.rows) {
    if (row.method == method && std::abs(row.epsilon - epsilon) < 1e-15 && std::abs(row.level - 0.95) < 1e-12) {
      return &row;
    }
  }
  return nullptr;
}

bool within(double x, double lo, double hi) { return x >= lo && x <= hi; }

Outcome gaussian_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  OracleCheckConfig config = default_oracle_check();
  config.accepted = 5000;
  const auto rows = oracle_check(config);
  const double elapsed = seconds_since(t0);
  const std::string text = oracle_csv(rows);
  save("oracle_check.csv", text);
  artifacts["oracle_check.csv"] = {text, [config] { return oracle_csv(oracle_check(config)); }};

  std::set<std::tuple<double, double, double>> seen;
  double worst = 0.0;
  double closed_error = 0.0;
  bool ok = rows.size() == 12;
  for (const auto& r : rows) {
    seen.insert({r.setting.epsilon, r.setting.mu_n, r.setting.b_n});
    ok = ok && r.setting.n == 100 && r.accepted >= 5000;
    const auto ref = oracle::normal_product(r.s_obs, 100.0, r.setting.epsilon, r.setting.mu_n, r.setting.b_n);
    closed_error = std::max({closed_error, std::abs(ref.mean - r.closed_mean) / std::sqrt(ref.variance),
                             std::abs(ref.variance - r.closed_variance) / ref.variance});
    const double se_mean = std::sqrt(ref.variance / static_cast<double>(r.accepted));
    const double z_mean = std::abs(r.sample_mean - ref.mean) / se_mean;
    const double se_var = ref.variance * std::sqrt(2.0 / static_cast<double>(r.accepted - 1));
    const double z_var = std::abs(r.sample_variance - ref.variance) / se_var;
    worst = std::max({worst, z_mean, z_var});
  }
  const std::set<std::tuple<double, double, double>> expected = [] {
    std::set<std::tuple<double, double, double>> s;
    for (double e : {0.2, 0.1, 0.05})
      for (double mu : {0.0, 0.5})
        for (double b : {0.0, 2.0}) s.insert({e, mu, b});
    return s;
  }();
  ok = ok && seen == expected && closed_error < 1e-10 && worst <= 4.0 && elapsed < 60.0;
  return {ok, "cases=" + std::to_string(rows.size()) + " max_z=" + fmt(worst) + " closed_form_err=" +
                  fmt(closed_error) + " seconds=" + fmt(elapsed)};
}

// {theta_acc - theta_hat_obs} vs {theta_hat - theta0}, KS at level 0.01.
struct MatchingCase {
  std::string label;
  std::function<std::unique_ptr<GenerativeModel>()> model;
  double theta0;
  double half_width;
};

std::size_t matching_trials(const MatchingCase& mc, std::uint64_t seed, std::string& notes) {
  constexpr std::size_t kTrials = 20;
  constexpr std::size_t kDraws = 5000;
  std::size_t kept = 0;
  std::size_t kept_reflected = 0;
  const auto base = mc.model();
  const ParameterPoint theta0 = ParameterPoint::Constant(1, mc.theta0);
  double max_d = 0.0;
  for (std::size_t t = 0; t < kTrials; ++t) {
    const std::uint64_t trial_seed = derive_seed(seed, t);
    RngStream obs_rng(derive_seed(trial_seed, 0), 0);
    const Dataset data = base->simulate(theta0, obs_rng);
    const auto model = base->bind(data);
    const SummaryVector s_obs = model->summarize(data);
    const double theta_hat = s_obs[0];
    const auto initial = improper_location(theta_hat - mc.half_width, theta_hat + mc.half_width);
    SamplerConfig sc;
    sc.stopping = TargetAccepted{kDraws, 2000 * kDraws};
    sc.kernel = KernelSpec(KernelFamily::gaussian, 0.01);
    sc.mode = FixedEpsilon{};
    const ParticleSet set = acc_reject(*model, initial, s_obs, sc, derive_seed(trial_seed, 1));
    std::vector<double> v;
    for (const auto& p : set.particles) v.push_back(p.theta[0] - theta_hat);
    std::vector<double> w;
    for (std::size_t j = 0; j < kDraws; ++j) {
      RngStream rng = substream(derive_seed(trial_seed, 2), j);
      w.push_back(model->summarize(model->simulate(theta0, rng))[0] - mc.theta0);
    }
    const double d = oracle::ks_two_sample(v, w);
    max_d = std::max(max_d, d);
    if (oracle::ks_pvalue(d, v.size(), w.size()) >= 0.01) ++kept;
    // diagnostic only: theta_hat_obs - theta_acc against the same sample
    std::vector<double> reflected(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) reflected[i] = -v[i];
    const double dr = oracle::ks_two_sample(reflected, w);
    if (oracle::ks_pvalue(dr, reflected.size(), w.size()) >= 0.01) ++kept_reflected;
  }
  notes += " " + mc.label + "=" + std::to_string(kept) + "/20 (max_ks=" + fmt(max_d) +
           ", reflected=" + std::to_string(kept_reflected) + "/20)";
  return kept;
}

Outcome distribution_matching() {
  const auto t0 = std::chrono::steady_clock::now();
  std::string notes;
  const MatchingCase gaussian{"gaussian", [] { return std::make_unique<GaussianLocationModel>(100); }, 0.0, 1.0};
  const MatchingCase cauchy{"cauchy",
                            [] {
                              return std::make_unique<CauchyModel>(400, CauchyUnknown::location,
                                                                   CauchySummary::median, 10.0, 0.55);
                            },
                            10.0, 0.5};
  const std::size_t g = matching_trials(gaussian, 21, notes);
  const std::size_t c = matching_trials(cauchy, 22, notes);
  const double elapsed = seconds_since(t0);
  return {g >= 18 && c >= 18 && elapsed < 300.0, notes.substr(1) + " seconds=" + fmt(elapsed)};
}

Outcome setting_i() {
  const auto& report = coverage("table3a_i");
  const ResultRow* row = find_row(report, "r-acc", true, "theta", 0.1);
  if (!row) return {false, "no adjusted r-acc row at acceptance 0.1"};
  const bool ok = row->replications == 200 && within(row->coverage, 0.91, 0.985) &&
                  within(row->median_size, 0.13, 0.21) && !report.failed;
  return {ok, "coverage=" + fmt(row->coverage) + " width=" + fmt(row->median_size) +
                  " datasets=" + std::to_string(row->replications)};
}

Outcome setting_iv() {
  const auto& report = coverage("table3b_iv");
  const ResultRow* acc_row = find_row(report, "r-acc", true, "theta", 0.1);
  const ResultRow* is_row = find_row(report, "is-abc", true, "theta", 0.1);
  if (!acc_row || !is_row) return {false, "missing r-acc or is-abc row at acceptance 0.1"};
  const double ratio = is_row->median_size / acc_row->median_size;
  const bool ok = within(acc_row->coverage, 0.93, 0.995) && within(acc_row->median_size, 2.0, 3.3) &&
                  ratio >= 1.5 && !report.failed;
  return {ok, "coverage=" + fmt(acc_row->coverage) + " width=" + fmt(acc_row->median_size) +
                  " is_abc_width=" + fmt(is_row->median_size) + " ratio=" + fmt(ratio)};
}

Outcome table1() {
  const auto& report = coverage("table1");
  const ResultRow* acc_row = find_fixed_eps_row(report, "r-acc", 0.001);
  const ResultRow* abc_row = find_fixed_eps_row(report, "r-abc", 0.001);
  if (!acc_row || !abc_row) return {false, "missing r-acc or r-abc row at epsilon 0.001"};
  const double p_acc = static_cast<double>(acc_row->accepted) / static_cast<double>(acc_row->attempts);
  const double p_abc = static_cast<double>(abc_row->accepted) / static_cast<double>(abc_row->attempts);
  const bool ok = !acc_row->adjusted && !abc_row->adjusted && p_acc >= 5.0 * p_abc &&
                  acc_row->coverage >= 0.97 && abc_row->coverage >= 0.97;
  return {ok, "acc_proportion=" + fmt(p_acc) + " abc_proportion=" + fmt(p_abc) + " ratio=" +
                  fmt(p_acc / p_abc) + " acc_coverage=" + fmt(acc_row->coverage) +
                  " abc_coverage=" + fmt(abc_row->coverage)};
}

Outcome joint_depth() {
  const auto& report = coverage("table3a_iii");
  std::string detail;
  bool ok = !report.failed;
  std::size_t found = 0;
  for (const auto& row : report.rows) {
    if (row.method != "r-acc" || std::abs(row.level - 0.95) > 1e-12) continue;
    ++found;
    ok = ok && row.parameter == "joint" && within(row.coverage, 0.86, 0.98);
    detail += " acc" + fmt(row.acceptance) + "=" + fmt(row.coverage);
  }
  return {ok && found == 3, "coverage:" + detail};
}

Outcome variance_property() {
  const std::vector<std::string> settings{"table3a_i",  "table3a_ii", "table3a_iii", "table3b_iv",
                                          "table3b_v",  "table3b_vi", "table3b_vii"};
  std::size_t checks = 0;
  std::size_t violations = 0;
  for (const auto& s : settings) {
    const auto& report = coverage(s);
    checks += report.variance_checks;
    violations += report.variance_violations;
  }
  return {checks > 0 && violations == 0,
          "checks=" + std::to_string(checks) + " violations=" + std::to_string(violations)};
}

Outcome figure1() {
  const auto t0 = std::chrono::steady_clock::now();
  Figure1Config config;
  config.n = 5000;
  config.epsilons = {0.1, 0.01, 0.001};
  const Figure1Data data = emit_figure1_data(config);
  const std::string text = figure1_csv(data);
  save("figure1.csv", text);
  artifacts["figure1.csv"] = {text, [config] { return figure1_csv(emit_figure1_data(config)); }};
  bool ok = data.series.size() == 3;
  std::string detail;
  for (const auto& s : data.series) {
    const double iqr_ratio =
        stats::interquartile_range(s.mean_particles) / stats::interquartile_range(s.median_particles);
    const double ks_mean = ks_distance_to_grid(s.mean_particles, data.grid, data.target);
    const double ks_median = ks_distance_to_grid(s.median_particles, data.grid, data.target);
    ok = ok && iqr_ratio > 2.0 && ks_mean > 0.05 && ks_median > 0.05;
    detail += " eps" + fmt(s.epsilon) + ":iqr_ratio=" + fmt(iqr_ratio) + ",ks_mean=" + fmt(ks_mean) +
              ",ks_median=" + fmt(ks_median);
  }
  return {ok, detail.substr(1) + " seconds=" + fmt(seconds_since(t0))};
}

// Subset MSL estimate shifted by +0.5 on log r.
PointEstimator biased_msl(const SyntheticLikelihoodConfig& sl, std::size_t burn_in) {
  return [sl, burn_in](const Dataset& d, RngStream& rng) {
    const auto local = RickerModel(d.size(), burn_in).bind(d);
    const SummaryVector s = local->summarize(d);
    ParameterPoint start(3);
    start << 3.5, std::log(0.5), std::log(std::max(stats::mean(d.observations), 0.5) / 3.5);
    ParameterPoint est = max_synthetic_likelihood(*local, s, start, sl, derive_seed(rng.seed(), rng.index())).estimate;
    est[0] += 0.5;
    return est;
  };
}

Outcome ricker() {
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentConfig config = load_config(config_path("table4_refined"));
  const auto& report = coverage("table4_refined");
  const ResultRow* phi = find_row(report, "r-acc", true, "log_phi", 0.1);
  if (!phi) return {false, "no adjusted log_phi row"};
  const double smoke_seconds = seconds_since(t0);

  MinibatchConfig mb;
  mb.subset_size = config.initial.subset_size;
  mb.batches = config.initial.batches;
  mb.policy = parse_overlap_policy(config.initial.policy);
  mb.stride = config.initial.stride;
  mb.estimator = biased_msl(config.synthetic, config.model.burn_in);
  RefineConfig rc;
  rc.particles = config.initial.refine_particles;
  rc.iterations = config.initial.refine_iterations;
  const double log_r0 = config.model.theta0[0];
  const RickerModel base(config.model.n, config.model.burn_in);
  std::size_t improved = 0;
  double crude_bias = 0.0;
  double refined_bias = 0.0;
  for (std::size_t t = 0; t < 20; ++t) {
    const Dataset data = replicate_dataset(config, t);
    const auto model = base.bind(data);
    const RefinedMinibatch r = refined_minibatch_rn(data, mb, *model, rc, derive_seed(77, t));
    double crude = 0.0;
    double refined = 0.0;
    for (const auto& c : r.crude_centers) crude += c[0];
    for (const auto& c : r.refined_centers) refined += c[0];
    crude = crude / static_cast<double>(r.crude_centers.size()) - log_r0;
    refined = refined / static_cast<double>(r.refined_centers.size()) - log_r0;
    crude_bias += crude / 20.0;
    refined_bias += refined / 20.0;
    if (std::abs(refined) < std::abs(crude)) ++improved;
  }
  const double total = seconds_since(t0);
  const bool ok = report.failures == 0 && within(phi->coverage, 0.7, 1.0) && improved >= 16 && total < 1800.0;
  return {ok, "log_phi_coverage=" + fmt(phi->coverage) + " failures=" + std::to_string(report.failures) +
                  " refined_closer=" + std::to_string(improved) + "/20 mean_crude_bias=" + fmt(crude_bias) +
                  " mean_refined_bias=" + fmt(refined_bias) + " smoke_seconds=" + fmt(smoke_seconds) +
                  " seconds=" + fmt(total)};
}

Outcome determinism() {
  if (artifacts.empty()) coverage("table3a_i");
  std::size_t same = 0;
  std::string differ;
  for (const auto& [name, artifact] : artifacts) {
    if (artifact.regenerate() == artifact.text) {
      ++same;
    } else {
      differ += " " + name;
    }
  }
  return {differ.empty(), std::to_string(same) + "/" + std::to_string(artifacts.size()) + " identical" +
                              (differ.empty() ? "" : " differing:" + differ)};
}

struct Criterion {
  int number;
  std::string name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "gaussian_oracle", gaussian_oracle},
      {2, "distribution_matching", distribution_matching},
      {3, "setting_i_coverage", setting_i},
      {4, "setting_iv_contrast", setting_iv},
      {5, "table1_acceptance_contrast", table1},
      {6, "joint_depth_region", joint_depth},
      {7, "adjusted_variance", variance_property},
      {8, "figure1_contrast", figure1},
      {9, "ricker_smoke", ricker},
      {10, "determinism", determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.number)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("error: ") + e.what()};
    }
    if (!outcome.pass) ++failures;
    std::cout << (outcome.pass ? "PASS" : "FAIL") << " " << c.number << " " << c.name << " " << outcome.detail
              << " (" << fmt(seconds_since(t0)) << " s)" << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
