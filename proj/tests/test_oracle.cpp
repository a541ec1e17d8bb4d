// Copyright 2026 The mimo_pareto Authors
// SPDX-License-Identifier: Apache-2.0

#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace mimo_pareto;

namespace {

RegionSample traced(const Scenario& s, int count, double tol = 1e-6) {
  TraceOptions opt;
  opt.tol = tol;
  return sample_from_boundary(s, trace_boundary(s, uniform_profiles(s.num_users(), count), opt));
}

RegionSample shifted(RegionSample b, double factor) {
  for (auto& r : b.rows) r.g_sum *= factor;
  return b;
}

}  // namespace

TEST(Oracle, DeterministicAcrossThreadCounts) {
  const Scenario s = mp_test::random_general(2, 2, 2, 2, 0.1);
  for (double refine : {0.0, 0.5}) {
    OracleConfig a;
    a.num_samples = 6000;
    a.chunk = 1000;
    a.refine_fraction = refine;
    a.threads = 1;
    OracleConfig b = a;
    b.threads = 4;
    const auto x = random_cloud(s, a);
    const auto y = random_cloud(s, b);
    ASSERT_EQ(x.rows.size(), y.rows.size());
    for (std::size_t i = 0; i < x.rows.size(); ++i) EXPECT_EQ(x.rows[i].g, y.rows[i].g);
    OracleConfig c = a;
    c.seed = 2;
    EXPECT_NE(random_cloud(s, c).rows.back().g, x.rows.back().g);
  }
}

TEST(Oracle, RowsAreFeasibleAndConsistent) {
  const Scenario s = mp_test::random_general(4, 3, 2, 2, 0.1);
  OracleConfig cfg;
  cfg.num_samples = 3000;
  cfg.refine_fraction = 0.3;
  const auto cloud = random_cloud(s, cfg);
  EXPECT_GE(cloud.rows.size(), cfg.num_samples / 2);
  EXPECT_LE(cloud.rows.size(), cfg.num_samples + static_cast<std::size_t>(s.num_users()));
  EXPECT_EQ(cloud.fingerprint, fingerprint(s));
  for (const auto& r : cloud.rows) {
    EXPECT_EQ(r.tag, Provenance::oracle);
    EXPECT_LE(r.usage.maxCoeff(), 1.0 + 1e-9);
    EXPECT_NEAR(r.usage.maxCoeff(), 1.0, 1e-9);
    for (int k = 0; k < 2; ++k) EXPECT_NEAR(r.g(k), mp_test::log2_1p(r.sinr(k)), 1e-12);
  }
}

TEST(Oracle, SingleUserReachesFullPowerMrt) {
  const Scenario s = mp_test::single_tx({mp_test::vec2(Complex(0.6, 0.2), Complex(-0.3, 0.9))}, 3.0);
  OracleConfig cfg;
  cfg.num_samples = 500;
  const auto cloud = random_cloud(s, cfg);
  double best = 0.0;
  for (const auto& r : cloud.rows) best = std::max(best, r.g(0));
  const double expected = std::log2(1.0 + 3.0 * s.channel(0).squaredNorm());
  EXPECT_NEAR(best, expected, 1e-12);
  for (const auto& r : cloud.rows) EXPECT_LE(r.g(0), expected + 1e-12);
}

TEST(Oracle, OrthogonalPairApproachesTheCorner) {
  const Scenario s = mp_test::orthogonal_pair();
  OracleConfig cfg;
  cfg.num_samples = 20000;
  cfg.refine_fraction = 0.5;
  const auto cloud = random_cloud(s, cfg);
  const double best = best_ray_value(cloud.points(), Eigen::Vector2d(0.5, 0.5));
  EXPECT_LE(best, 2.0 + 1e-9);
  EXPECT_GE(best, 2.0 * (1.0 - 0.02));
}

TEST(Oracle, NeverPassesTheTracedBoundary) {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const Scenario s = mp_test::random_general(seed, 2, 2, 2, 0.1);
    OracleConfig cfg;
    cfg.num_samples = 20000;
    cfg.refine_fraction = 0.5;
    cfg.seed = seed;
    const auto rep = check_dominance(random_cloud(s, cfg), traced(s, 21), 1e-3);
    EXPECT_TRUE(rep.passed) << "seed " << seed << " excess " << rep.worst_excess;
    EXPECT_LT(rep.front_gap, 0.05) << "seed " << seed;
  }
}

TEST(Oracle, FlagsAnUnderstatedBoundary) {
  const Scenario s = mp_test::random_general(6, 2, 2, 2, 0.1);
  OracleConfig cfg;
  cfg.num_samples = 20000;
  cfg.refine_fraction = 0.5;
  const auto cloud = random_cloud(s, cfg);
  const RegionSample b = traced(s, 11);
  const auto low = check_dominance(cloud, shifted(b, 0.9), 1e-3);
  EXPECT_FALSE(low.passed);
  EXPECT_GT(low.violations, 5u);
  EXPECT_GT(low.worst_excess, 1e-2);
  const auto high = check_dominance(cloud, shifted(b, 1.1), 1e-3);
  EXPECT_TRUE(high.passed);
  EXPECT_GT(high.front_gap, 0.09 - 1e-6);
}

TEST(Oracle, AngleGridMode) {
  const Scenario s = mp_test::orthogonal_pair();
  OracleConfig cfg;
  cfg.mode = OracleMode::angle_grid;
  cfg.angle_steps = 6;
  cfg.power_grid = 4;
  cfg.num_samples = 100000;
  const auto a = random_cloud(s, cfg);
  const auto b = random_cloud(s, cfg);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  EXPECT_GT(a.rows.size(), 10u);
  for (std::size_t i = 0; i < a.rows.size(); ++i) EXPECT_EQ(a.rows[i].g, b.rows[i].g);
  EXPECT_LE(best_ray_value(a.points(), Eigen::Vector2d(0.5, 0.5)), 2.0 + 1e-9);
}

TEST(Oracle, RejectsBadConfig) {
  const Scenario s = mp_test::orthogonal_pair();
  OracleConfig cfg;
  cfg.num_samples = 0;
  EXPECT_THROW(random_cloud(s, cfg), ValidationError);
  cfg.num_samples = 10;
  cfg.power_grid = 0;
  EXPECT_THROW(random_cloud(s, cfg), ValidationError);
}

TEST(Oracle, AxisCandidatesSkipDeadUsers) {
  const Scenario s = mp_test::single_tx({mp_test::vec2(1.0, 0.0), mp_test::vec2(0.0, 0.0)}, 2.0);
  const auto ax = axis_candidates(s);
  ASSERT_EQ(ax.size(), 1u);
  EXPECT_EQ(ax[0].powers(0), 1.0);
  EXPECT_EQ(ax[0].powers(1), 0.0);
}

TEST(Verify, HelpersMatchHandComputedValues) {
  EXPECT_NEAR(max_relative_deviation(Eigen::Vector2d(1.1, 2.0), Eigen::Vector2d(1.0, 2.0)), 0.1, 1e-12);
  EXPECT_NEAR(max_relative_deviation(Eigen::Vector2d(1e-10, 0.0), Eigen::Vector2d(0.0, 0.0)), 0.1, 1e-12);
  const Scenario s = mp_test::orthogonal_pair();
  TraceOptions opt;
  opt.tol = 1e-7;
  const auto bp = trace_point(s, FairnessProfile::from(Eigen::Vector2d(0.5, 0.5)), opt);
  EXPECT_LT(tightness_deviation(s, bp), 1e-6);
  ASSERT_TRUE(bp.duals.has_value());
  const Eigen::VectorXd p = round_trip_point(s, *bp.duals);
  EXPECT_LT((p - Eigen::Vector2d(1.0, 1.0)).norm(), 1e-5);
}

TEST(Verify, SmallScenarioPassesEveryCheck) {
  const Scenario s = generate_scenario(ScenarioKind::network_mimo, {2, 1, 2}, 10.0, 0.05, 3);
  VerifyOptions opt;
  opt.profiles = 21;
  opt.oracle.num_samples = 20000;
  std::vector<BoundaryPoint> pts;
  const auto rep = verify_scenario(s, opt, &pts);
  EXPECT_EQ(pts.size(), 21u);
  ASSERT_EQ(rep.checks.size(), 5u);
  for (const auto& c : rep.checks) EXPECT_TRUE(c.passed) << c.name << " " << c.value << " " << c.detail;
  const Json j = rep.to_json();
  EXPECT_EQ(j["checks"].size(), 5u);
  EXPECT_EQ(j["passed"], rep.passed());
}

TEST(Verify, StoredBoundaryChecks) {
  const Scenario s = generate_scenario(ScenarioKind::network_mimo, {2, 1, 2}, 10.0, 0.05, 3);
  RegionSample b = traced(s, 7, 1e-6);
  EXPECT_TRUE(verify_boundary_sample(s, b).passed);
  RegionSample inflated = b;
  inflated.rows[3].g *= 1.05;
  const auto bad = verify_boundary_sample(s, inflated);
  EXPECT_FALSE(bad.passed);
  EXPECT_EQ(bad.value, 1.0);
  const Scenario other = generate_scenario(ScenarioKind::network_mimo, {2, 1, 2}, 10.0, 0.05, 4);
  const auto mismatch = verify_boundary_sample(other, b);
  EXPECT_FALSE(mismatch.passed);
  EXPECT_EQ(mismatch.detail, "fingerprint mismatch");
}
