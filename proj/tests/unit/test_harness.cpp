#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "acc/config.hpp"
#include "acc/errors.hpp"
#include "acc/harness.hpp"
#include "acc/stats.hpp"

using namespace acc;

namespace {

const char* kCauchy = R"({
  "setting": "small",
  "model": {"name": "cauchy", "n": 100, "theta0": [10.0], "unknown": "location", "summary": "median"},
  "initial": {"kind": "minibatch", "policy": "disjoint", "estimator": "median"},
  "prior": {"kind": "flat"},
  "methods": [{"algorithm": "r-acc", "adjust": true}, {"algorithm": "is-abc", "adjust": true}],
  "sampler": {"n_proposals": 2000, "acceptance": [0.05, 0.2]},
  "alphas": [0.05, 0.2],
  "replications": 6,
  "seed": 3,
  "paper_scale": {"sampler": {"n_proposals": 100000}, "replications": 300}
})";

const char* kGaussian = R"({
  "model": {"name": "gaussian", "n": 100, "theta0": [0.8]},
  "initial": {"kind": "normal", "mu": 0.0, "b": 2.0},
  "prior": {"kind": "normal", "mu": 0.0, "b": 2.0},
  "methods": [{"algorithm": "r-acc", "adjust": false}],
  "sampler": {"epsilons": [0.2, 0.1], "target_accepted": 500},
  "oracle": true,
  "replications": 1
})";

std::string csv(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  write_result_csv(out, rows);
  return out.str();
}

std::size_t lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

std::string replaced(std::string s, const std::string& from, const std::string& to) {
  const auto at = s.find(from);
  EXPECT_NE(at, std::string::npos) << from;
  if (at != std::string::npos) s.replace(at, from.size(), to);
  return s;
}

}  // namespace

TEST(Config, ParsesAndMergesScaleBlock) {
  const auto c = parse_config(kCauchy);
  EXPECT_EQ(c.setting, "small");
  EXPECT_EQ(c.model.n, 100u);
  EXPECT_EQ(c.methods.size(), 2u);
  EXPECT_EQ(c.sampler.n_proposals, 2000u);
  EXPECT_EQ(c.replications, 6u);
  const auto big = parse_config(kCauchy, true);
  EXPECT_EQ(big.sampler.n_proposals, 100000u);
  EXPECT_EQ(big.replications, 300u);
  EXPECT_EQ(big.sampler.acceptance, c.sampler.acceptance);
}

TEST(Config, CanonicalFormRoundTrips) {
  const auto c = parse_config(kCauchy);
  const auto again = parse_config(config_to_json(c));
  EXPECT_EQ(config_to_json(again), config_to_json(c));
}

TEST(Config, RejectsMalformedInput) {
  EXPECT_THROW(parse_config(replaced(kGaussian, "[0.2, 0.1]", "[-0.1]")), ValidationError);
  EXPECT_THROW(parse_config(replaced(kGaussian, "\"oracle\"", "\"oracles\"")), ValidationError);
  EXPECT_THROW(parse_config(replaced(kGaussian, "\"n\": 100", "\"n\": \"x\"")), ValidationError);
  EXPECT_THROW(parse_config("{not json"), ValidationError);
  EXPECT_THROW(load_config("/nonexistent/config.json"), Error);
  EXPECT_THROW(parse_config(replaced(kCauchy, "\"acceptance\"", "\"epsilons\": [0.1], \"acceptance\"")),
               ValidationError);
}

TEST(RunSingle, OracleColumns) {
  const auto c = parse_config(kGaussian);
  const Dataset data = replicate_dataset(c, 0);
  const auto r = run_single(c, data, 1);
  ASSERT_EQ(r.runs.size(), 2u);
  for (const auto& run : r.runs) {
    const auto closed = gaussian_acc_closed_form(r.s_obs[0], 100, run.epsilon, 0.0, 2.0);
    EXPECT_DOUBLE_EQ(run.oracle_mean, closed.mean);
    EXPECT_DOUBLE_EQ(run.oracle_variance, closed.variance);
    EXPECT_NEAR(run.sample_mean, closed.mean, 5.0 * std::sqrt(closed.variance / 500.0));
    EXPECT_EQ(run.particles.size(), 500u);
  }
  std::ostringstream out;
  write_run_csv(out, c, r);
  EXPECT_NE(out.str().find("oracle_mean,oracle_variance,sample_mean,sample_variance"), std::string::npos);
}

TEST(RunSingle, AccWithPriorAsInitialIsAbc) {
  auto c = parse_config(kGaussian);
  c.oracle = false;
  c.initial.kind = "prior";
  c.methods = {MethodSpec{"r-abc", false, "auto"}, MethodSpec{"r-acc", false, "auto"}};
  const Dataset data = replicate_dataset(c, 0);
  const auto r = run_single(c, data, 9);
  ASSERT_EQ(r.runs.size(), 4u);
  for (std::size_t t = 0; t < 2; ++t) {
    const auto& abc = r.runs[2 * t].particles;
    const auto& acc = r.runs[2 * t + 1].particles;
    ASSERT_EQ(abc.size(), acc.size());
    EXPECT_EQ(abc.attempts, acc.attempts);
    for (std::size_t i = 0; i < abc.size(); ++i) EXPECT_EQ(abc.particles[i].theta, acc.particles[i].theta);
  }
}

TEST(RunSingle, WrongDatasetSize) {
  const auto c = parse_config(kGaussian);
  EXPECT_THROW(run_single(c, Dataset{{1.0, 2.0, 3.0, 4.0}}, 1), InvalidArgument);
}

TEST(RunCoverage, SingleReplicationIsZeroOrOne) {
  auto c = parse_config(kCauchy);
  c.replications = 1;
  const auto report = run_coverage(c);
  ASSERT_FALSE(report.rows.empty());
  for (const auto& row : report.rows) EXPECT_TRUE(row.coverage == 0.0 || row.coverage == 1.0);
}

TEST(RunCoverage, RowsAccountingAndSchema) {
  const auto c = parse_config(kCauchy);
  const auto report = run_coverage(c);
  EXPECT_EQ(report.failures, 0u);
  EXPECT_FALSE(report.failed);
  // 2 acceptance levels x 2 methods x 2 alphas
  ASSERT_EQ(report.rows.size(), 8u);
  std::size_t attempts = 0;
  for (const auto& row : report.rows) {
    EXPECT_GE(row.coverage, 0.0);
    EXPECT_LE(row.coverage, 1.0);
    EXPECT_EQ(row.replications, 6u);
    if (row.level == 0.95) attempts += row.attempts;
  }
  EXPECT_EQ(attempts, report.total_attempts);
  EXPECT_EQ(report.total_attempts, 6u * 2u * 2u * 2000u);
  EXPECT_EQ(report.variance_violations, 0u);
  EXPECT_EQ(report.variance_checks, 6u * 4u);
  const std::string text = csv(report.rows);
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "setting,method,adjusted,parameter,acceptance,epsilon,level,coverage,median_size,replications,failures,"
            "attempts,accepted");
  EXPECT_EQ(lines(text), 9u);
}

TEST(RunCoverage, ByteIdenticalReruns) {
  auto c = parse_config(kCauchy);
  c.workers = 2;
  const std::string a = csv(run_coverage(c).rows);
  const std::string b = csv(run_coverage(c).rows);
  EXPECT_EQ(a, b);
  c.workers = 1;
  EXPECT_EQ(csv(run_coverage(c).rows), a);
}

TEST(RunCoverage, JointDepthRegion) {
  std::string text = replaced(kCauchy, "\"theta0\": [10.0], \"unknown\": \"location\", \"summary\": \"median\"",
                              "\"theta0\": [10.0, 0.55], \"unknown\": \"joint\", \"summary\": \"median_mad\"");
  text = replaced(text, "\"estimator\": \"median\"", "\"estimator\": \"median_mad\"");
  text = replaced(text, "\"kind\": \"flat\"", "\"kind\": \"location_scale\"");
  const auto c = parse_config(text);
  const auto report = run_coverage(c);
  ASSERT_EQ(report.rows.size(), 8u);
  for (const auto& row : report.rows) {
    EXPECT_EQ(row.parameter, "joint");
    EXPECT_GT(row.median_size, 0.0);
  }
}

TEST(ResultCsv, NumberFormat) {
  EXPECT_EQ(format_number(0.123456789), "0.123457");
  EXPECT_EQ(format_number(NAN), "NA");
  EXPECT_EQ(format_number(2.0), "2");
}

TEST(Figure1, ShapeAndContrast) {
  Figure1Config c;
  c.n = 5000;
  c.epsilons = {0.1, 0.05};
  c.grid_points = 301;
  c.particles = 300;
  const auto data = emit_figure1_data(c);
  std::ostringstream out;
  write_figure1_csv(out, data);
  EXPECT_EQ(lines(out.str()), 1u + 301u * 2u);
  for (const auto& s : data.series) {
    const auto mode = std::max_element(s.median_kde.begin(), s.median_kde.end()) - s.median_kde.begin();
    EXPECT_NEAR(data.grid[static_cast<std::size_t>(mode)], c.theta0, 0.2);
    EXPECT_GT(stats::interquartile_range(s.mean_particles), 2.0 * stats::interquartile_range(s.median_particles));
  }
}

TEST(OracleCheck, DefaultGrid) {
  const auto grid = default_oracle_check();
  EXPECT_EQ(grid.cases.size(), 12u);
  OracleCheckConfig small = grid;
  small.cases.resize(2);
  small.accepted = 1000;
  const auto rows = oracle_check(small);
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& r : rows) {
    EXPECT_EQ(r.accepted, 1000u);
    EXPECT_LT(std::abs(r.mean_z), 5.0);
  }
}
