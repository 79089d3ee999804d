#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "acc/errors.hpp"
#include "acc/inference.hpp"
#include "acc/initial.hpp"
#include "acc/models.hpp"
#include "acc/samplers.hpp"
#include "acc/stats.hpp"
#include "oracles.hpp"
#include "test_models.hpp"

using namespace acc;
using testing_models::point;
using testing_models::scalar_particles;

namespace {

std::vector<double> one_to(int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  std::iota(v.begin(), v.end(), 1.0);
  return v;
}

MatchingMaps identity_maps() {
  MatchingMaps m;
  m.v = [](const ParameterPoint& t, const SummaryVector&) { return Eigen::VectorXd(t); };
  m.w = m.v;
  return m;
}

ParticleSet bivariate(std::size_t m, std::uint64_t seed) {
  auto rng = substream(seed, 0);
  ParticleSet set;
  for (std::size_t i = 0; i < m; ++i) {
    Particle q;
    q.theta = Eigen::Vector2d(rng.normal(), rng.normal());
    q.summary = SummaryVector::Zero(1);
    set.particles.push_back(q);
  }
  set.attempts = m;
  set.tolerance = 1.0;
  return set;
}

}  // namespace

TEST(EmpiricalQuantile, Examples) {
  const auto v = one_to(100);
  EXPECT_EQ(empirical_quantile(v, 0.05), 5.0);
  EXPECT_EQ(empirical_quantile(v, 0.05, QuantileRank::from_largest), 96.0);
  const std::vector<double> three{3, 1, 2};
  EXPECT_EQ(empirical_quantile(three, 0.5), 2.0);
  const std::vector<double> flat(17, 4.25);
  for (double a : {0.01, 0.3, 0.5, 0.99}) EXPECT_EQ(empirical_quantile(flat, a), 4.25);
  EXPECT_THROW(empirical_quantile(std::vector<double>{}, 0.5), InvalidArgument);
  EXPECT_THROW(empirical_quantile(v, 0.0), InvalidArgument);
  EXPECT_THROW(empirical_quantile(v, 1.0), InvalidArgument);
}

TEST(ConfidenceDistribution, ReflectsAboutEstimate) {
  const auto cd = cd_from_particles(scalar_particles({1, 2, 3}, {}), 2.0);
  EXPECT_EQ(cd.points(), (std::vector<double>{1, 2, 3}));
  EXPECT_NEAR(cd(1.0), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(cd(2.5), 2.0 / 3.0, 1e-15);
  EXPECT_EQ(cd.median(), 2.0);
}

TEST(ConfidenceDistribution, SymmetricSampleHasMedianAtEstimate) {
  std::vector<double> theta;
  auto rng = substream(1, 0);
  for (int i = 0; i < 500; ++i) {
    const double d = rng.normal();
    theta.push_back(4.0 + d);
    theta.push_back(4.0 - d);
  }
  theta.push_back(4.0);
  EXPECT_DOUBLE_EQ(cd_from_particles(scalar_particles(theta, {}), 4.0).median(), 4.0);
}

TEST(ConfidenceDistribution, IsValidCdf) {
  auto rng = substream(2, 0);
  std::vector<double> theta(300);
  std::vector<double> w(300);
  for (std::size_t i = 0; i < theta.size(); ++i) {
    theta[i] = rng.normal();
    w[i] = rng.uniform() < 0.1 ? 0.0 : rng.uniform();
  }
  const auto cd = cd_from_particles(scalar_particles(theta, {}, w), 0.3);
  EXPECT_EQ(cd(-1e9), 0.0);
  EXPECT_EQ(cd(1e9), 1.0);
  double last = 0.0;
  for (double t = -5.0; t <= 5.0; t += 0.01) {
    EXPECT_GE(cd(t), last);
    last = cd(t);
  }
  EXPECT_THROW(cd_from_particles(bivariate(10, 1), 0.0), InvalidArgument);
}

TEST(ConfidenceDistribution, UpperBoundUsesLowerQuantile) {
  const auto v = one_to(100);
  const auto set = scalar_particles(v, {});
  const double theta_hat = 50.0;
  const auto region = interval_from_w(
      set, MatchingMaps::location([=](const SummaryVector&) { return point(theta_hat); }), SummaryVector::Zero(1),
      0.05, Sidedness::upper);
  EXPECT_EQ(region.kind(), RegionKind::one_sided);
  EXPECT_TRUE(std::isinf(region.lo()));
  EXPECT_NEAR(region.hi(), 2.0 * theta_hat - empirical_quantile(v, 0.05), 1e-8);
}

TEST(IntervalFromW, CentralOrderStatistics) {
  const auto region = interval_from_w(scalar_particles(one_to(100), {}), identity_maps(), SummaryVector::Zero(1),
                                      0.05, Sidedness::two_sided_central);
  EXPECT_NEAR(region.lo(), 3.0, 1e-8);
  EXPECT_NEAR(region.hi(), 98.0, 1e-8);
  EXPECT_NEAR(region.size(), 95.0, 1e-8);
  EXPECT_DOUBLE_EQ(region.level(), 0.95);
}

TEST(IntervalFromW, LocationMapReflectsQuantiles) {
  std::vector<double> theta;
  for (int i = 1; i <= 50; ++i) {
    theta.push_back(7.0 + 0.01 * i);
    theta.push_back(7.0 - 0.01 * i);
  }
  const auto r = interval_from_w(scalar_particles(theta, {}),
                                 MatchingMaps::location([](const SummaryVector&) { return point(7.0); }),
                                 SummaryVector::Zero(1), 0.1, Sidedness::two_sided_central);
  // v ranks 5 and 95 are -0.46 and 0.45
  EXPECT_NEAR(r.lo(), 7.0 - 0.45, 1e-8);
  EXPECT_NEAR(r.hi(), 7.0 + 0.46, 1e-8);
}

TEST(IntervalFromW, ScaleMapInversion) {
  const auto v = one_to(200);
  std::vector<double> theta;
  for (double x : v) theta.push_back(0.01 * x);
  const double sigma_hat = 0.8;
  const auto r = interval_from_w(scalar_particles(theta, {}),
                                 MatchingMaps::scale([=](const SummaryVector&) { return point(sigma_hat); }),
                                 SummaryVector::Zero(1), 0.1, Sidedness::two_sided_central);
  // v = theta / sigma_hat, W(theta) = theta / sigma_hat
  const double q_lo = empirical_quantile(theta, 0.05) / sigma_hat;
  const double q_hi = empirical_quantile(theta, 0.95) / sigma_hat;
  EXPECT_NEAR(r.lo(), sigma_hat * q_lo, 1e-9);
  EXPECT_NEAR(r.hi(), sigma_hat * q_hi, 1e-9);
}

TEST(IntervalFromW, NonMonotoneMapIsRejected) {
  MatchingMaps m;
  m.v = [](const ParameterPoint& t, const SummaryVector&) { return Eigen::VectorXd(t.array().square()); };
  m.w = m.v;
  EXPECT_THROW(interval_from_w(scalar_particles({-2, -1, 0, 1, 2}, {}), m, SummaryVector::Zero(1), 0.1,
                               Sidedness::two_sided_central),
               NonMonotoneMapError);
}

TEST(IntervalFromW, Nesting) {
  auto rng = substream(4, 0);
  std::vector<double> theta(400);
  for (auto& t : theta) t = rng.normal();
  const auto set = scalar_particles(theta, {});
  const auto maps = MatchingMaps::location([](const SummaryVector&) { return point(0.1); });
  ConfidenceRegion previous = interval_from_w(set, maps, SummaryVector::Zero(1), 0.5, Sidedness::two_sided_central);
  for (double a : {0.3, 0.1, 0.05, 0.01}) {
    const auto r = interval_from_w(set, maps, SummaryVector::Zero(1), a, Sidedness::two_sided_central);
    EXPECT_LE(r.lo(), previous.lo());
    EXPECT_GE(r.hi(), previous.hi());
    previous = r;
  }
}

TEST(MahalanobisDepth, Examples) {
  std::vector<Eigen::VectorXd> ref{Eigen::Vector2d(1, 0), Eigen::Vector2d(-1, 0), Eigen::Vector2d(0, 1),
                                   Eigen::Vector2d(0, -1)};
  // weighted covariance is diag(1/2, 1/2)
  EXPECT_DOUBLE_EQ(mahalanobis_depth(Eigen::Vector2d(0, 0), ref, {}), 1.0);
  EXPECT_NEAR(mahalanobis_depth(Eigen::Vector2d(std::sqrt(0.5), 0), ref, {}), 0.5, 1e-14);
  EXPECT_NEAR(mahalanobis_depth(Eigen::Vector2d(0.5, 0.5), ref, {}), 0.5, 1e-14);
  double last = 1.0;
  for (double t = 0.1; t < 5.0; t += 0.1) {
    const double d = mahalanobis_depth(Eigen::Vector2d(0.3 * t, -t), ref, {});
    EXPECT_LT(d, last);
    last = d;
  }
  std::vector<Eigen::VectorXd> line{Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1), Eigen::Vector2d(2, 2)};
  EXPECT_THROW(mahalanobis_depth(Eigen::Vector2d(0, 0), line, {}), InvalidArgument);
  EXPECT_GT(mahalanobis_depth(Eigen::Vector2d(1, 1), line, {}, true), 0.99);
}

TEST(DepthRegion, CenterAlwaysInside) {
  const auto set = bivariate(500, 3);
  const auto maps = identity_maps();
  DepthRegionOptions opt;
  opt.volume_draws = 0;
  for (double a : {0.01, 0.2, 0.5, 0.9}) {
    const auto region = depth_region(set, maps, SummaryVector::Zero(1), a, opt);
    EXPECT_TRUE(region.contains(ParameterPoint(region.reference()->center())));
  }
}

TEST(DepthRegion, SmallAlphaContainsAlmostAll) {
  const auto set = bivariate(500, 5);
  DepthRegionOptions opt;
  opt.volume_draws = 0;
  const auto region = depth_region(set, identity_maps(), SummaryVector::Zero(1), 1e-6, opt);
  int inside = 0;
  for (const auto& q : set.particles) inside += region.contains(q.theta);
  EXPECT_GE(inside, 499);
}

TEST(DepthRegion, ContentMatchesLevel) {
  const auto set = bivariate(100000, 7);
  DepthRegionOptions opt;
  opt.volume_draws = 0;
  const auto region = depth_region(set, identity_maps(), SummaryVector::Zero(1), 0.05, opt);
  const auto fresh = bivariate(100000, 8);
  int inside = 0;
  for (const auto& q : fresh.particles) inside += region.contains(q.theta);
  EXPECT_NEAR(inside / 1e5, 0.95, 0.01);
  // chi-square(2) 95% radius
  EXPECT_NEAR(region.w_space_volume(), M_PI * 2.0 * std::log(20.0), 0.05 * M_PI * 2.0 * std::log(20.0));
}

TEST(DepthRegion, NestedAcrossLevels) {
  const auto set = bivariate(2000, 9);
  DepthRegionOptions opt;
  opt.volume_draws = 0;
  const auto wide = depth_region(set, identity_maps(), SummaryVector::Zero(1), 0.05, opt);
  const auto narrow = depth_region(set, identity_maps(), SummaryVector::Zero(1), 0.2, opt);
  auto rng = substream(10, 0);
  for (int i = 0; i < 5000; ++i) {
    const ParameterPoint x = Eigen::Vector2d(3 * rng.normal(), 3 * rng.normal());
    if (narrow.contains(x)) {
      EXPECT_TRUE(wide.contains(x));
    }
  }
}

TEST(DepthRegion, AffineInvariant) {
  const auto set = bivariate(3000, 11);
  Eigen::Matrix2d a;
  a << 2.0, 0.7, -0.3, 0.5;
  const Eigen::Vector2d b(4.0, -1.0);
  MatchingMaps transformed;
  transformed.v = [=](const ParameterPoint& t, const SummaryVector&) { return Eigen::VectorXd(a * t + b); };
  transformed.w = transformed.v;
  DepthRegionOptions opt;
  opt.volume_draws = 0;
  const auto plain = depth_region(set, identity_maps(), SummaryVector::Zero(1), 0.1, opt);
  const auto moved = depth_region(set, transformed, SummaryVector::Zero(1), 0.1, opt);
  auto rng = substream(12, 0);
  int disagree = 0;
  for (int i = 0; i < 5000; ++i) {
    const ParameterPoint x = Eigen::Vector2d(2.5 * rng.normal(), 2.5 * rng.normal());
    disagree += plain.contains(x) != moved.contains(x);
  }
  EXPECT_LE(disagree, 2);
}

TEST(DepthRegion, MonteCarloVolumeMatchesEllipse) {
  const auto set = bivariate(4000, 13);
  DepthRegionOptions opt;
  opt.volume_draws = 40000;
  opt.volume_seed = 3;
  const auto region = depth_region(set, identity_maps(), SummaryVector::Zero(1), 0.05, opt);
  EXPECT_NEAR(region.size(), region.w_space_volume(), 0.05 * region.w_space_volume());
}

TEST(CoverageScore, Examples) {
  std::vector<ConfidenceRegion> all;
  for (int i = 0; i < 5; ++i) all.push_back(ConfidenceRegion::interval(2.0 - 1.0, 2.0 + 1.0, 0.95));
  const auto s = coverage_score(all, point(2.0));
  EXPECT_EQ(s.coverage, 1.0);
  EXPECT_EQ(s.median_size, 2.0);
  EXPECT_EQ(coverage_score(all, point(9.0)).coverage, 0.0);
  all.push_back(ConfidenceRegion::one_sided(-INFINITY, 3.0, 0.95));
  EXPECT_THROW(coverage_score(all, point(2.0)), InvalidArgument);
  EXPECT_THROW(coverage_score({}, point(2.0)), InvalidArgument);
}

TEST(ConfidenceRegion, Records) {
  EXPECT_EQ(ConfidenceRegion::interval(1.5, 2.25, 0.95).to_record(), "interval level=0.95 lo=1.5 hi=2.25");
  EXPECT_THROW(ConfidenceRegion::interval(2.0, 1.0, 0.95), InvalidArgument);
  EXPECT_THROW(ConfidenceRegion::interval(1.0, 2.0, 1.0), InvalidArgument);
  DepthRegionOptions opt;
  opt.volume_draws = 0;
  const auto region = depth_region(bivariate(50, 1), identity_maps(), SummaryVector::Zero(1), 0.1, opt);
  const std::string rec = region.to_record();
  EXPECT_EQ(rec.rfind("depth_contour level=0.9 threshold=", 0), 0u) << rec;
  EXPECT_NE(rec.find("reference="), std::string::npos);
}

TEST(CauchyPosteriorGrid, SingleObservationIsCauchyShape) {
  std::vector<double> grid;
  for (int g = 0; g <= 4000; ++g) grid.push_back(-200.0 + 0.1 * g);
  const auto d = cauchy_target_posterior_grid(Dataset{{1.0}}, 0.55, grid);
  for (double t : {-3.0, 0.0, 1.0, 2.5}) {
    const auto g = static_cast<std::size_t>(std::lround((t + 200.0) / 0.1));
    const double shape = 1.0 / (1.0 + std::pow((1.0 - t) / 0.55, 2));
    const double ref = 1.0 / (1.0 + std::pow(0.0 / 0.55, 2));
    const auto g1 = static_cast<std::size_t>(std::lround((1.0 + 200.0) / 0.1));
    EXPECT_NEAR(d[g] / d[g1], shape / ref, 1e-12);
  }
  // normalized by the trapezoid rule
  double area = 0.0;
  for (std::size_t g = 1; g < grid.size(); ++g) area += 0.05 * (d[g] + d[g - 1]);
  EXPECT_NEAR(area, 1.0, 1e-12);
}

TEST(CauchyPosteriorGrid, SymmetricData) {
  std::vector<double> grid;
  for (int g = -500; g <= 500; ++g) grid.push_back(0.01 * g);
  const auto d = cauchy_target_posterior_grid(Dataset{{-1.3, 1.3}}, 0.55, grid);
  for (std::size_t g = 0; g < grid.size(); ++g) EXPECT_NEAR(d[g], d[grid.size() - 1 - g], 1e-12);
  EXPECT_THROW(cauchy_target_posterior_grid(Dataset{{0.0}}, 0.0, grid), InvalidArgument);
}

TEST(KsDistanceToGrid, UniformSample) {
  std::vector<double> grid{0.0, 0.5, 1.0};
  std::vector<double> dens{1.0, 1.0, 1.0};
  EXPECT_NEAR(ks_distance_to_grid({0.25, 0.75}, grid, dens), 0.25, 1e-15);
  std::vector<double> far(10, 5.0);
  EXPECT_NEAR(ks_distance_to_grid(far, grid, dens), 1.0, 1e-15);
}

// ABC with the median summary targets p(theta | median), not p(theta | x).
TEST(CauchyPosteriorGrid, MedianAbcStaysAwayFromTarget) {
  const CauchyModel model(50, CauchyUnknown::location, CauchySummary::median);
  auto rng = substream(21, 0);
  const Dataset data = model.simulate(point(10.0), rng);
  const auto bound = model.bind(data);
  const SummaryVector s_obs = bound->summarize(data);
  std::vector<double> grid;
  for (int g = 0; g <= 2000; ++g) grid.push_back(s_obs[0] - 3.0 + 0.003 * g);
  const auto target = cauchy_target_posterior_grid(data, 0.55, grid);
  const auto prior = improper_location(s_obs[0] - 3.0, s_obs[0] + 3.0);
  for (double eps : {0.1, 0.01, 0.001}) {
    SamplerConfig c;
    c.stopping = TargetAccepted{1000, 20000000};
    c.kernel = KernelSpec(KernelFamily::gaussian, eps);
    const auto set = abc_reject(*bound, prior, s_obs, c, 31);
    EXPECT_GT(ks_distance_to_grid(set.coordinate(0), grid, target), 0.05) << eps;
  }
}
