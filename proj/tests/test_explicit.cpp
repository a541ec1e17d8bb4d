// Copyright 2026 The mimo_pareto Authors
// SPDX-License-Identifier: Apache-2.0

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace mimo_pareto;
using mp_test::vec2;

namespace {

Eigen::MatrixXcd dense_pinv(const Eigen::MatrixXcd& a) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > 1e-10 * sv(0)) inv(i) = 1.0 / sv(i);
  }
  return svd.matrixV() * inv.cast<Complex>().asDiagonal() * svd.matrixU().adjoint();
}

struct ReferenceStrategy {
  std::vector<Eigen::VectorXcd> w;
  Eigen::VectorXd gammas;
  Eigen::VectorXd powers;
};

// Impairment-free closed form with full N x N matrices, and powers from the SINR
// equalities  p_k |h_k^H w_k|^2 / gamma_k - sum_{j != k} p_j |h_k^H C_k D_j w_j|^2 = sigma_k^2.
ReferenceStrategy reference_ideal(const Scenario& s, const ExplicitParams& prm) {
  const int kr = s.num_users();
  const int n = s.num_antennas();
  ReferenceStrategy r;
  r.gammas = Eigen::VectorXd::Zero(kr);
  for (int k = 0; k < kr; ++k) {
    const Eigen::MatrixXcd dk = mp_test::dense_selection(s, k, true).cast<Complex>();
    Eigen::MatrixXcd psi = Eigen::MatrixXcd::Zero(n, n);
    for (int j = 0; j < kr; ++j) {
      const Eigen::VectorXcd c = mp_test::dense_selection(s, j, false).cast<Complex>() * s.channel(j);
      psi += prm.mu(j) / s.noise(j) * dk * c * c.adjoint() * dk;
    }
    for (int l = 0; l < s.num_constraints(); ++l) psi += prm.lambda(l) / s.constraint(l).limit * dk * s.weight(l, k) * dk;
    const Eigen::VectorXcd dh = dk * s.channel(k);
    Eigen::VectorXcd w = dense_pinv(psi) * dh;
    r.w.push_back(w / w.norm());
    const double a = prm.mu(k) / s.noise(k);
    r.gammas(k) = a * (dh.adjoint() * dense_pinv(psi - a * dh * dh.adjoint()) * dh)(0, 0).real();
  }
  Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(kr, kr);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(kr);
  for (int k = 0; k < kr; ++k) {
    const Eigen::MatrixXcd ck = mp_test::dense_selection(s, k, false).cast<Complex>();
    for (int j = 0; j < kr; ++j) {
      const Eigen::VectorXcd v = mp_test::dense_selection(s, j, true).cast<Complex>() * r.w[static_cast<std::size_t>(j)];
      const double gain = std::norm((ck * s.channel(k)).dot(v));
      sys(k, j) = j == k ? std::norm(s.channel(k).dot(v)) / r.gammas(k) : -gain;
    }
    rhs(k) = s.noise(k);
  }
  r.powers = sys.fullPivLu().solve(rhs);
  return r;
}

ExplicitParams random_params(std::mt19937_64& rng, int kr, int nl) {
  std::uniform_real_distribution<double> uni(0.05, 1.0);
  Eigen::VectorXd mu(kr);
  Eigen::VectorXd lambda(nl);
  for (int k = 0; k < kr; ++k) mu(k) = uni(rng);
  for (int l = 0; l < nl; ++l) lambda(l) = uni(rng);
  return ExplicitParams::normalized(mu, lambda);
}

}  // namespace

TEST(ExplicitParams, Normalization) {
  const auto p = ExplicitParams::normalized(Eigen::Vector2d(1, 3), Eigen::Vector3d(2, 2, 4));
  EXPECT_TRUE(p.is_normalized());
  EXPECT_DOUBLE_EQ(p.mu(1), 0.75);
  EXPECT_DOUBLE_EQ(p.lambda(2), 0.5);
  EXPECT_THROW(ExplicitParams::normalized(Eigen::Vector2d(-1, 2), Eigen::VectorXd::Ones(1)), ValidationError);
  EXPECT_THROW(ExplicitParams::normalized(Eigen::Vector2d(1, 2), Eigen::VectorXd::Zero(1)), ValidationError);
  EXPECT_THROW(ExplicitParams::normalized(Eigen::Vector2d(0, 0), Eigen::VectorXd::Ones(1)), ValidationError);
}

TEST(PsiMatrix, Examples) {
  const Scenario s0 = mp_test::scalar_chain(0.0);
  const Eigen::MatrixXcd psi = psi_matrix(s0, Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1), 0);
  Eigen::MatrixXcd expected = Eigen::MatrixXcd::Zero(2, 2);
  expected(0, 0) = 1.5;
  expected(1, 1) = 0.5;
  EXPECT_LT((psi - expected).norm(), 1e-15);

  const Scenario s1 = mp_test::scalar_chain(0.1);
  const Eigen::MatrixXcd psi1 = psi_matrix(s1, Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1), 0);
  expected(0, 0) += 0.01;
  EXPECT_LT((psi1 - expected).norm(), 1e-15);

  const Scenario o = mp_test::orthogonal_pair();
  const Eigen::MatrixXcd psi0 = psi_matrix(o, Eigen::VectorXd::Zero(2), Eigen::VectorXd::Ones(1), 1);
  EXPECT_LT((psi0 - 0.5 * Eigen::MatrixXcd::Identity(2, 2)).norm(), 1e-15);
}

TEST(Strategy1, ScalarChainWithoutImpairments) {
  const Scenario s = mp_test::scalar_chain(0.0);
  const auto r = strategy1(s, ExplicitParams::normalized(Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1)));
  ASSERT_EQ(r.status, Strategy1Status::valid);
  EXPECT_NEAR(std::abs(r.strategy.directions[0](0)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(r.strategy.directions[0](1)), 0.0, 1e-15);
  EXPECT_NEAR(r.gammas(0), 2.0, 1e-12);
  EXPECT_NEAR(r.coupling(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(r.strategy.powers(0), 2.0, 1e-12);
  EXPECT_NEAR(sinr(s, r.strategy, 0), 2.0, 1e-12);
}

TEST(Strategy1, ScalarChainWithImpairments) {
  const Scenario s = mp_test::scalar_chain(0.1);
  const auto r = strategy1(s, ExplicitParams::normalized(Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1)));
  ASSERT_EQ(r.status, Strategy1Status::valid);
  const double gamma = 1.0 / 0.51;
  EXPECT_NEAR(r.gammas(0), gamma, 1e-12);
  EXPECT_NEAR(r.coupling(0, 0), 1.0 - gamma * 0.01, 1e-12);
  EXPECT_NEAR(r.strategy.powers(0), 2.0, 1e-12);
  EXPECT_NEAR(sinr(s, r.strategy, 0), gamma, 1e-9);
  EXPECT_NEAR(sinr(s, r.strategy, 0), 2.0 / 1.02, 1e-12);
}

TEST(Strategy1, OrthogonalPair) {
  const Scenario s = mp_test::orthogonal_pair();
  const auto r = strategy1(s, ExplicitParams::normalized(Eigen::Vector2d(0.5, 0.5), Eigen::VectorXd::Ones(1)));
  ASSERT_EQ(r.status, Strategy1Status::valid);
  EXPECT_NEAR(std::abs(r.strategy.directions[0](0)), 1.0, 1e-12);
  EXPECT_NEAR(std::abs(r.strategy.directions[1](1)), 1.0, 1e-12);
  EXPECT_LT((r.gammas - Eigen::Vector2d(1, 1)).norm(), 1e-12);
  EXPECT_LT((r.coupling - Eigen::Matrix2d::Identity()).norm(), 1e-12);
  EXPECT_LT((r.strategy.powers - Eigen::Vector2d(1, 1)).norm(), 1e-12);
  EXPECT_LT((evaluate_point(s, r.strategy) - Eigen::Vector2d(1, 1)).norm(), 1e-12);
}

TEST(Strategy1, ZeroPriorityUserIsInactive) {
  const Scenario s = mp_test::orthogonal_pair();
  const auto r = strategy1(s, ExplicitParams::normalized(Eigen::Vector2d(1, 0), Eigen::VectorXd::Ones(1)));
  ASSERT_EQ(r.status, Strategy1Status::valid);
  EXPECT_EQ(r.strategy.powers(1), 0.0);
  EXPECT_EQ(r.gammas(1), 0.0);
  EXPECT_FALSE(r.active[1]);
  EXPECT_NEAR(r.strategy.directions[1].norm(), 1.0, 1e-12);
  // single-user point: full power to user 1
  EXPECT_NEAR(evaluate_point(s, strategy2(s, {Eigen::Vector2d(1, 0), Eigen::VectorXd::Ones(1)}).strategy)(0),
              std::log2(3.0), 1e-12);
}

TEST(Strategy1, MatchesImpairmentFreeReference) {
  int compared = 0;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const Scenario s = mp_test::random_general(seed, 2, 2, 2 + seed % 2, 0.0);
    std::mt19937_64 rng(seed);
    const ExplicitParams prm = random_params(rng, s.num_users(), s.num_constraints());
    const auto r = strategy1(s, prm);
    const ReferenceStrategy ref = reference_ideal(s, prm);
    for (int k = 0; k < s.num_users(); ++k) {
      EXPECT_NEAR(r.gammas(k), ref.gammas(k), 1e-9 * std::max(1.0, ref.gammas(k)));
      EXPECT_NEAR(std::abs(ref.w[static_cast<std::size_t>(k)].dot(r.strategy.directions[static_cast<std::size_t>(k)])), 1.0,
                  1e-9);
    }
    if (r.status != Strategy1Status::valid) continue;
    ++compared;
    EXPECT_LT((r.strategy.powers - ref.powers).norm(), 1e-8 * std::max(1.0, ref.powers.norm())) << "seed " << seed;
  }
  EXPECT_GT(compared, 10);
}

TEST(Strategy1, SinrConsistencyWithImpairments) {
  int valid = 0;
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const Scenario s = mp_test::random_general(seed, 1 + seed % 3, 2, 2 + seed % 2, 0.15);
    std::mt19937_64 rng(seed);
    const auto r = strategy1(s, random_params(rng, s.num_users(), s.num_constraints()));
    if (r.status != Strategy1Status::valid) continue;
    ++valid;
    EXPECT_GE(r.strategy.powers.minCoeff(), 0.0);
    for (int k = 0; k < s.num_users(); ++k) {
      if (r.strategy.powers(k) > 0.0) {
        EXPECT_NEAR(mp_test::dense_sinr(s, r.strategy, k), r.gammas(k), 1e-6 * r.gammas(k)) << "seed " << seed;
      }
    }
  }
  EXPECT_GT(valid, 20);
}

TEST(Strategy1, InvariantUnderJointScaling) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Scenario s = mp_test::random_general(seed, 2, 2, 3, 0.1);
    std::mt19937_64 rng(seed);
    const ExplicitParams prm = random_params(rng, s.num_users(), s.num_constraints());
    const auto a = strategy1(s, prm);
    for (double t : {1e-3, 0.37, 42.0}) {
      const auto gam = closed_form_gammas(s, prm.mu * t, prm.lambda * t);
      EXPECT_LT((gam - a.gammas).norm(), 1e-10 * std::max(1.0, a.gammas.norm()));
      const auto b = strategy1(s, ExplicitParams::normalized(prm.mu * t, prm.lambda * t));
      EXPECT_EQ(a.status, b.status);
      EXPECT_LT((a.strategy.powers - b.strategy.powers).norm(), 1e-10 * std::max(1.0, a.strategy.powers.norm()));
      EXPECT_LT((a.coupling - b.coupling).norm(), 1e-10 * std::max(1.0, a.coupling.norm()));
    }
  }
}

TEST(Strategy2, AlwaysFeasibleAndNeverScalesUp) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const Scenario s = mp_test::random_general(seed, 2, 2, 2, 0.1);
    std::mt19937_64 rng(seed);
    const ExplicitParams prm = random_params(rng, 2, s.num_constraints());
    const auto s1 = strategy1(s, prm);
    const auto s2 = strategy2(s, prm);
    EXPECT_LE(constraint_usage(s, s2.strategy).max, 1.0 + 1e-9);
    if (s2.c <= 1.0) {
      EXPECT_EQ(s2.strategy.powers, s1.strategy.powers);
    }
  }
  const Scenario s = mp_test::scalar_chain();
  BeamformingStrategy st = zero_strategy(s);
  EXPECT_EQ(scale_to_feasible(s, st).c, 0.0);
  st.directions[0] = vec2(1.0, 0.0);
  st.powers(0) = 4.0;
  const auto r = scale_to_feasible(s, st);
  EXPECT_DOUBLE_EQ(r.c, 2.0);
  EXPECT_DOUBLE_EQ(r.strategy.powers(0), 2.0);
  EXPECT_DOUBLE_EQ(constraint_usage(s, r.strategy).max, 1.0);
}

TEST(MonotonicitySigns, SingleUserLambdaDerivativeNegative) {
  const Scenario s = mp_test::scalar_chain(0.0);
  const auto rep = corollary1_check(s, {Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1)});
  // gamma = mu / lambda * q |h|^2 for one user: d/d lambda = -q at mu = lambda = 1.
  EXPECT_NEAR(rep.d_lambda(0, 0), -2.0, 1e-6);
  EXPECT_NEAR(rep.d_mu(0, 0), 2.0, 1e-6);
  EXPECT_TRUE(rep.ok());
}

TEST(MonotonicitySigns, OrthogonalPairSignsAndSymmetry) {
  const Scenario s = mp_test::orthogonal_pair();
  const auto rep = corollary1_check(s, ExplicitParams::normalized(Eigen::Vector2d(0.5, 0.5), Eigen::VectorXd::Ones(1)));
  EXPECT_TRUE(rep.ok());
  EXPECT_LE(rep.d_mu(0, 1), 1e-9);
  EXPECT_NEAR(rep.d_mu(0, 0), rep.d_mu(1, 1), 1e-8);
}

TEST(MonotonicitySigns, SignsOnRandomScenarios) {
  int checked = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Scenario s = mp_test::random_general(seed, 2, 2, 3, 0.1);
    std::mt19937_64 rng(seed + 100);
    for (int t = 0; t < 5; ++t) {
      const ExplicitParams prm = random_params(rng, s.num_users(), s.num_constraints());
      if (strategy1(s, prm).status != Strategy1Status::valid) continue;
      const auto rep = corollary1_check(s, prm);
      EXPECT_TRUE(rep.ok()) << "seed " << seed << " violation " << rep.worst_violation;
      ++checked;
    }
  }
  EXPECT_GT(checked, 10);
}

TEST(MonotonicitySigns, RejectsBadStep) {
  const Scenario s = mp_test::scalar_chain(0.0);
  const ExplicitParams prm{Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1)};
  EXPECT_THROW(corollary1_check(s, prm, 1e-14), ValidationError);
  EXPECT_THROW(corollary1_check(s, prm, 0.5), ValidationError);
}

TEST(SimplexGrid, CountsAndOrder) {
  const auto g = simplex_grid(2, 2);
  ASSERT_EQ(g.size(), 3u);
  EXPECT_EQ(g[0], Eigen::Vector2d(0, 1));
  EXPECT_EQ(g[1], Eigen::Vector2d(0.5, 0.5));
  EXPECT_EQ(g[2], Eigen::Vector2d(1, 0));
  EXPECT_EQ(simplex_grid(3, 100).size(), 5151u);
  EXPECT_DOUBLE_EQ(simplex_grid_size(3, 100), 5151.0);
  for (const auto& v : simplex_grid(4, 7)) EXPECT_NEAR(v.sum(), 1.0, 1e-15);
  EXPECT_EQ(grid_parts(0.01), 100);
  EXPECT_EQ(grid_parts(0.02), 50);
  EXPECT_EQ(grid_parts(0.3), 4);
  EXPECT_THROW(grid_parts(0.0), ValidationError);
  EXPECT_THROW(grid_parts(1.5), ValidationError);
}

TEST(Sweep, GridSizesAndSkips) {
  const Scenario s = mp_test::orthogonal_pair();
  const auto r = sweep_explicit(s, 0.5);
  EXPECT_EQ(r.total, 3u);
  EXPECT_EQ(r.entries.size() + r.skipped, 3u);

  const auto net = generate_scenario(ScenarioKind::network_mimo, {2, 1, 2}, 10.0, 0.0, 3);
  SweepOptions opt;
  opt.keep_invalid = true;
  const auto big = sweep_explicit(net, 0.01, opt);
  EXPECT_EQ(big.total, 101u * 101u);
  EXPECT_EQ(big.entries.size(), big.total);

  SweepOptions capped;
  capped.max_points = 100;
  EXPECT_THROW(sweep_explicit(net, 0.01, capped), ValidationError);
}

TEST(Sweep, DeterministicAcrossThreadCounts) {
  const auto s = generate_scenario(ScenarioKind::network_mimo, {3, 1, 2}, 10.0, 0.1, 4);
  SweepOptions one;
  one.threads = 1;
  SweepOptions many;
  many.threads = 4;
  const auto a = sweep_explicit(s, 0.05, one);
  const auto b = sweep_explicit(s, 0.05, many);
  ASSERT_EQ(a.entries.size(), b.entries.size());
  for (std::size_t i = 0; i < a.entries.size(); ++i) EXPECT_EQ(a.entries[i].point, b.entries[i].point);
}
