#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "acc/config.hpp"
#include "acc/errors.hpp"
#include "acc/harness.hpp"

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  bool paper_scale = false;
  std::string out;
};

void add_common(CLI::App* app, Common& c, bool needs_config) {
  auto* opt = app->add_option("--config", c.config, "experiment configuration (JSON)");
  if (needs_config) opt->required()->check(CLI::ExistingFile);
  app->add_option("--seed", c.seed, "master seed (overrides the configuration)");
  app->add_option("--workers", c.workers, "worker threads")->check(CLI::PositiveNumber);
  app->add_flag("--paper-scale", c.paper_scale, "apply the configuration's paper_scale block");
  app->add_option("--out", c.out, "output CSV path (stdout when omitted)");
}

acc::ExperimentConfig load(const Common& c) {
  acc::ExperimentConfig config = acc::load_config(c.config, c.paper_scale);
  if (c.seed) config.seed = *c.seed;
  if (c.workers) config.workers = *c.workers;
  if (!c.out.empty()) config.output = c.out;
  config.validate();
  return config;
}

// writes through `fn` to `path`, or stdout for an empty path
template <class Fn>
void emit(const std::string& path, Fn&& fn) {
  if (path.empty()) {
    fn(std::cout);
    return;
  }
  std::ofstream file(path);
  if (!file) throw acc::Error("cannot write '" + path + "'");
  fn(file);
}

std::string timing_path(const std::string& out) {
  const auto dot = out.rfind(".csv");
  return (dot == std::string::npos ? out : out.substr(0, dot)) + ".timing.csv";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Approximate confidence distribution computing experiments"};
  app.require_subcommand(1);

  Common run_opts;
  std::string data_path;
  auto* run = app.add_subcommand("run", "run every configured method on one dataset");
  add_common(run, run_opts, true);
  run->add_option("--data", data_path, "observed dataset, one value per line (simulated when omitted)")
      ->check(CLI::ExistingFile);

  Common cov_opts;
  auto* coverage = app.add_subcommand("coverage", "replicated coverage study");
  add_common(coverage, cov_opts, true);

  Common fig_opts;
  acc::Figure1Config fig;
  auto* figure1 = app.add_subcommand("figure1", "grid densities for the Cauchy mean/median comparison");
  add_common(figure1, fig_opts, false);
  figure1->add_option("--n", fig.n, "sample size");
  figure1->add_option("--epsilons", fig.epsilons, "tolerances");
  figure1->add_option("--particles", fig.particles, "accepted draws per tolerance");

  Common oracle_opts;
  acc::OracleCheckConfig oracle = acc::default_oracle_check();
  auto* oracle_cmd = app.add_subcommand("oracle-check", "compare Gaussian samplers with the closed form");
  add_common(oracle_cmd, oracle_opts, false);
  oracle_cmd->add_option("--accepted", oracle.accepted, "accepted draws per case");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const acc::ExperimentConfig config = load(run_opts);
      acc::Dataset data;
      if (data_path.empty()) {
        data = acc::replicate_dataset(config, 0);
      } else {
        std::ifstream in(data_path);
        data = acc::read_dataset(in);
      }
      const acc::SingleRunResult result = acc::run_single(config, data, config.seed);
      for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
      emit(config.output, [&](std::ostream& os) { acc::write_run_csv(os, config, result); });
      return 0;
    }
    if (*coverage) {
      const acc::ExperimentConfig config = load(cov_opts);
      const acc::CoverageReport report = acc::run_coverage(config);
      for (const auto& msg : report.failure_messages) std::cerr << "failed: " << msg << '\n';
      emit(config.output, [&](std::ostream& os) { acc::write_result_csv(os, report.rows); });
      if (!config.output.empty()) {
        emit(timing_path(config.output), [&](std::ostream& os) { acc::write_timing_csv(os, report.rows); });
      }
      std::cerr << report.failures << " of " << config.replications << " datasets failed; "
                << report.variance_violations << " of " << report.variance_checks
                << " adjusted variances exceeded the unadjusted ones\n";
      return report.failed ? 3 : 0;
    }
    if (*figure1) {
      if (fig_opts.seed) fig.seed = *fig_opts.seed;
      if (fig_opts.workers) fig.workers = *fig_opts.workers;
      const acc::Figure1Data data = acc::emit_figure1_data(fig);
      emit(fig_opts.out, [&](std::ostream& os) { acc::write_figure1_csv(os, data); });
      return 0;
    }
    if (*oracle_cmd) {
      if (oracle_opts.seed) oracle.seed = *oracle_opts.seed;
      if (oracle_opts.workers) oracle.workers = *oracle_opts.workers;
      const auto rows = acc::oracle_check(oracle);
      emit(oracle_opts.out, [&](std::ostream& os) { acc::write_oracle_csv(os, rows); });
      return 0;
    }
  } catch (const acc::ValidationError& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
