// Copyright 2026 The mimo_pareto Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mimo_pareto/explicit_param.hpp"
#include "mimo_pareto/feasibility.hpp"
#include "mimo_pareto/implicit_boundary.hpp"
#include "mimo_pareto/oracle.hpp"
#include "mimo_pareto/region.hpp"
#include "mimo_pareto/scenario.hpp"
#include "mimo_pareto/scenario_io.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace mimo_pareto {

struct CheckResult {
  std::string name;
  bool passed = true;
  double value = 0.0;      // measured worst case
  double threshold = 0.0;  // limit the value is compared against
  std::string detail;
};

struct VerificationReport {
  std::vector<CheckResult> checks;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
  }

  Json to_json() const {
    Json arr = Json::array();
    for (const auto& c : checks) {
      arr.push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"threshold", c.threshold},
                     {"detail", c.detail}});
    }
    return {{"passed", passed()}, {"checks", arr}};
  }
};

/// Relative deviation |a - b| / |b| per component, with |b| floored at 1e-9.
inline double max_relative_deviation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < b.size(); ++i) {
    worst = std::max(worst, std::abs(a(i) - b(i)) / std::max(std::abs(b(i)), 1e-9));
  }
  return worst;
}

/// Largest relative mismatch between achieved SINR and the target alpha_k g_sum
/// over users with alpha_k > 0.
inline double tightness_deviation(const Scenario& s, const BoundaryPoint& bp) {
  double worst = 0.0;
  for (int k = 0; k < s.num_users(); ++k) {
    if (bp.profile.alpha(k) == 0.0) continue;
    const double target = g_inverse(s.metric(k), bp.profile.alpha(k) * bp.g_sum);
    worst = std::max(worst, std::abs(bp.sinr(k) - target) / std::max(target, 1e-12));
  }
  return worst;
}

/// Performance point of the closed-form strategy parametrized by the normalized
/// multipliers of a traced point.
inline Eigen::VectorXd round_trip_point(const Scenario& s, const ExplicitParams& duals, Strategy1Status* status = nullptr) {
  const Strategy1Result r = strategy1(s, duals);
  if (status) *status = r.status;
  if (r.status != Strategy1Status::valid) return {};
  return evaluate_point(s, r.strategy);
}

struct VerifyOptions {
  int profiles = 101;             // uniform profiles for two users; parts + 1 per axis otherwise
  TraceOptions trace;
  double tightness_tol = 1e-4;    // relative SINR mismatch at traced points
  double round_trip_tol = 1e-3;   // relative per-component mismatch
  bool run_oracle = true;         // skipped automatically above desk scale
  OracleConfig oracle{.refine_fraction = 0.5};
  double dominance_tol = 1e-3;
  double front_tol = 0.02;
};

/// Traced boundary plus the checks that can be run on any scenario: SINR tightness,
/// the bisection contract, the dual round trip (points with a vanishing priority
/// weight are skipped), and on small instances the brute-force dominance check.
inline VerificationReport verify_scenario(const Scenario& s, const VerifyOptions& opt,
                                          std::vector<BoundaryPoint>* traced = nullptr) {
  VerificationReport rep;
  const auto profiles = uniform_profiles(s.num_users(), s.num_users() == 2 ? opt.profiles : std::max(2, std::min(opt.profiles, 11)));
  const auto pts = trace_boundary(s, profiles, opt.trace);

  CheckResult tight{"sinr-tightness", true, 0.0, opt.tightness_tol, ""};
  CheckResult contract{"bisection-contract", true, 0.0, opt.trace.tol, ""};
  CheckResult trip{"dual-round-trip", true, 0.0, opt.round_trip_tol, ""};
  std::size_t trip_count = 0;
  std::size_t trip_skipped = 0;
  for (const auto& bp : pts) {
    if (bp.g_sum > 0.0) tight.value = std::max(tight.value, tightness_deviation(s, bp));
    const int expected = bp.g_max > opt.trace.tol
                             ? std::min(opt.trace.max_iterations, static_cast<int>(std::ceil(std::log2(bp.g_max / opt.trace.tol))))
                             : 0;
    if (bp.iterations != expected) contract.passed = false;
    contract.value = std::max(contract.value, std::abs(ray_value(bp.point, bp.profile.alpha) - bp.g_sum));
    if (!bp.duals || bp.weak_pareto) {
      ++trip_skipped;
      continue;
    }
    Strategy1Status st = Strategy1Status::valid;
    const Eigen::VectorXd p = round_trip_point(s, *bp.duals, &st);
    ++trip_count;
    if (st != Strategy1Status::valid) {
      trip.passed = false;
      trip.detail += "strategy from multipliers is " + to_string(st) + "; ";
      continue;
    }
    trip.value = std::max(trip.value, max_relative_deviation(p, bp.point));
  }
  tight.passed = tight.value <= opt.tightness_tol;
  contract.passed = contract.passed && contract.value <= opt.trace.tol;
  trip.passed = trip.passed && trip.value <= opt.round_trip_tol;
  trip.detail += std::to_string(trip_count) + " points compared, " + std::to_string(trip_skipped) + " skipped";
  rep.checks.push_back(tight);
  rep.checks.push_back(contract);
  rep.checks.push_back(trip);

  const bool desk = s.num_users() <= 3 && s.num_antennas() <= 6;
  if (opt.run_oracle && desk) {
    const RegionSample boundary = sample_from_boundary(s, pts);
    const RegionSample cloud = random_cloud(s, opt.oracle);
    const DominanceReport d = check_dominance(cloud, boundary, opt.dominance_tol);
    rep.checks.push_back({"oracle-dominance", d.passed, d.worst_excess, opt.dominance_tol,
                          std::to_string(cloud.rows.size()) + " samples, " + std::to_string(d.violations) + " rays violated"});
    rep.checks.push_back({"oracle-front", d.front_gap <= opt.front_tol, d.front_gap, opt.front_tol,
                          "mean gap " + std::to_string(d.mean_front_gap)});
  }
  if (traced) *traced = pts;
  return rep;
}

/// Checks a stored boundary against an independent feasibility test: every row with
/// a profile must be achievable (its point is inside the region up to `tol`).
inline CheckResult verify_boundary_sample(const Scenario& s, const RegionSample& boundary, double tol = 1e-4) {
  CheckResult c{"stored-boundary-feasible", true, 0.0, tol, ""};
  if (boundary.fingerprint != fingerprint(s)) {
    c.passed = false;
    c.value = std::numeric_limits<double>::infinity();
    c.detail = "fingerprint mismatch";
    return c;
  }
  boundary.check();
  const FeasibilityModel model(s);
  std::size_t bad = 0;
  for (const auto& r : boundary.rows) {
    Eigen::VectorXd gam(s.num_users());
    bool reachable = true;
    for (int k = 0; k < s.num_users(); ++k) {
      const double v = std::max(0.0, r.g(k) - tol * std::max(1.0, std::abs(r.g(k))));
      try {
        gam(k) = v > 0.0 ? g_inverse(s.metric(k), v) : 0.0;
      } catch (const OutOfRangeError&) {
        reachable = false;
      }
    }
    if (!reachable || !solve_feasibility(model, gam, *default_solver(), {}).feasible()) ++bad;
  }
  c.value = static_cast<double>(bad);
  c.threshold = 0.0;
  c.passed = bad == 0;
  c.detail = std::to_string(bad) + " of " + std::to_string(boundary.rows.size()) + " stored points are not achievable";
  return c;
}

}  // namespace mimo_pareto
