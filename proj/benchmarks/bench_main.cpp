#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "acc/initial.hpp"
#include "acc/kernels.hpp"
#include "acc/models.hpp"
#include "acc/rng.hpp"
#include "acc/samplers.hpp"

using namespace acc;

static void BM_RngUniform(benchmark::State& state) {
  RngStream rng(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(rng.uniform());
}
BENCHMARK(BM_RngUniform);

static void BM_RngNormal(benchmark::State& state) {
  RngStream rng(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(rng.normal());
}
BENCHMARK(BM_RngNormal);

static void BM_KernelAccept(benchmark::State& state) {
  const KernelSpec kernel(KernelFamily::gaussian, 0.1);
  Eigen::VectorXd u = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(state.range(0)), 0.05);
  for (auto _ : state) benchmark::DoNotOptimize(accept_probability(kernel, u));
}
BENCHMARK(BM_KernelAccept)->Arg(1)->Arg(2)->Arg(13);

static void BM_CauchySimulateMedian(benchmark::State& state) {
  const CauchyModel model(static_cast<std::size_t>(state.range(0)), CauchyUnknown::location,
                          CauchySummary::median);
  const ParameterPoint theta = ParameterPoint::Constant(1, 10.0);
  RngStream rng(2, 0);
  for (auto _ : state) benchmark::DoNotOptimize(model.summarize(model.simulate(theta, rng)));
}
BENCHMARK(BM_CauchySimulateMedian)->Arg(400)->Arg(5000);

static void BM_RickerSimulateSummarize(benchmark::State& state) {
  const RickerModel base(50, 50);
  ParameterPoint theta(3);
  theta << 3.8, std::log(0.3), std::log(10.0);
  RngStream rng(3, 0);
  const auto model = base.bind(base.simulate(theta, rng));
  for (auto _ : state) benchmark::DoNotOptimize(model->summarize(model->simulate(theta, rng)));
}
BENCHMARK(BM_RickerSimulateSummarize);

static void BM_AccRejectCauchy(benchmark::State& state) {
  const CauchyModel base(400, CauchyUnknown::location, CauchySummary::median);
  RngStream rng(4, 0);
  const Dataset data = base.simulate(ParameterPoint::Constant(1, 10.0), rng);
  const auto model = base.bind(data);
  const SummaryVector s_obs = model->summarize(data);
  const auto initial = improper_location(s_obs[0] - 0.5, s_obs[0] + 0.5);
  SamplerConfig config;
  config.stopping = FixedProposals{static_cast<std::size_t>(state.range(0))};
  config.kernel = KernelSpec(KernelFamily::gaussian, 0.05);
  for (auto _ : state) benchmark::DoNotOptimize(acc_reject(*model, initial, s_obs, config, 5).size());
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AccRejectCauchy)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_KdeSampleAndDensity(benchmark::State& state) {
  std::vector<ParameterPoint> centers;
  RngStream rng(6, 0);
  for (int i = 0; i < state.range(0); ++i) {
    ParameterPoint p(2);
    p << rng.normal(), rng.normal();
    centers.push_back(p);
  }
  const KdeEstimate kde(centers, kde_bandwidth(centers));
  for (auto _ : state) {
    const ParameterPoint x = kde.sample(rng);
    benchmark::DoNotOptimize(kde.log_density(x));
  }
}
BENCHMARK(BM_KdeSampleAndDensity)->Arg(20)->Arg(400);
BENCHMARK_MAIN();
