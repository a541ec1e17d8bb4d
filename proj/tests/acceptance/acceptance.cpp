// Copyright 2026 The mimo_pareto Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance run: one PASS/FAIL line per criterion on stdout, measurements and
// diagnostics on stderr. Exit status is nonzero when any criterion fails.

#include "../test_support.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <optional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace mimo_pareto;

namespace {

struct Outcome {
  bool passed = true;
  std::string summary;
};

Outcome fail(Outcome o, const std::string& why) {
  o.passed = false;
  o.summary += (o.summary.empty() ? "" : "; ") + why;
  return o;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

Eigen::VectorXd dense_point(const Scenario& s, const BeamformingStrategy& st) {
  Eigen::VectorXd p(s.num_users());
  for (int k = 0; k < s.num_users(); ++k) p(k) = mp_test::log2_1p(mp_test::dense_sinr(s, st, k));
  return p;
}

FairnessProfile random_alpha(std::mt19937_64& rng, int users) {
  std::uniform_real_distribution<double> uni(0.05, 1.0);
  Eigen::VectorXd a(users);
  for (int k = 0; k < users; ++k) a(k) = uni(rng);
  return FairnessProfile::from(a);
}

// ---------------------------------------------------------------------------

Outcome scalar_chain() {
  Outcome o;
  const Scenario s = mp_test::scalar_chain(0.1);
  const auto r = strategy1(s, ExplicitParams::normalized(Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1)));
  const double gamma = 1.0 / 0.51;
  const double m = 1.0 - gamma * 0.01;
  const double sinr_dense = mp_test::dense_sinr(s, r.strategy, 0);
  o.summary = "gamma " + num(r.gammas(0)) + ", M " + num(r.coupling(0, 0)) + ", p " + num(r.strategy.powers(0)) +
              ", |SINR - gamma| " + num(std::abs(sinr_dense - gamma));
  if (r.status != Strategy1Status::valid) return fail(o, "strategy not valid");
  if (std::abs(r.gammas(0) - gamma) > 1e-9) o = fail(o, "gamma mismatch");
  if (std::abs(r.coupling(0, 0) - m) > 1e-9) o = fail(o, "M mismatch");
  if (std::abs(r.strategy.powers(0) - 2.0) > 1e-9) o = fail(o, "power mismatch");
  if (std::abs(sinr_dense - gamma) > 1e-9) o = fail(o, "SINR differs from gamma");
  if (std::abs(sinr(s, r.strategy, 0) - gamma) > 1e-9) o = fail(o, "library SINR differs from gamma");
  return o;
}

struct TracedScenario {
  Scenario scenario;
  std::vector<BoundaryPoint> points;
};

Outcome duality_round_trip(std::vector<TracedScenario>& keep) {
  Outcome o;
  std::mt19937_64 rng(2026);
  TraceOptions opt;
  opt.tol = 1e-6;
  double worst = 0.0;
  double worst_norm = 0.0;
  int resampled = 0;
  int failures = 0;
  for (int i = 0; i < 20; ++i) {
    const int nj = 2 + i % 3;
    const double kappa = (i / 3) % 2 == 0 ? 0.0 : 0.1;
    const Scenario s = generate_scenario(ScenarioKind::miso_ic, {2, nj, 2}, 10.0, kappa, 100 + static_cast<std::uint64_t>(i));
    const FeasibilityModel model(s);
    TracedScenario ts{s, {}};
    bool done = false;
    for (int attempt = 0; attempt < 20 && !done; ++attempt) {
      const BoundaryPoint bp = trace_point(model, random_alpha(rng, 2), opt);
      ts.points.push_back(bp);
      // Ray endpoints on the weak part of the boundary carry a vanishing multiplier
      // and are not reachable from the closed form; draw another profile.
      if (bp.weak_pareto) {
        ++resampled;
        continue;
      }
      done = true;
      if (!bp.duals) {
        ++failures;
        std::cerr << "  scenario " << i << ": multipliers not normalizable\n";
        break;
      }
      worst_norm = std::max({worst_norm, std::abs(bp.duals->mu.sum() - 1.0), std::abs(bp.duals->lambda.sum() - 1.0)});
      Strategy1Status st = Strategy1Status::valid;
      const Eigen::VectorXd p = round_trip_point(s, *bp.duals, &st);
      if (st != Strategy1Status::valid) {
        ++failures;
        std::cerr << "  scenario " << i << ": closed form is " << to_string(st) << "\n";
        break;
      }
      const double dev = max_relative_deviation(p, bp.point);
      worst = std::max(worst, dev);
      if (dev > 1e-3) ++failures;
    }
    if (!done) ++failures;
    keep.push_back(std::move(ts));
  }
  o.summary = "20 scenarios, worst relative deviation " + num(worst) + ", normalization error " + num(worst_norm) +
              ", weak profiles redrawn " + std::to_string(resampled);
  if (failures > 0) o = fail(o, std::to_string(failures) + " scenarios failed");
  if (worst_norm > 1e-3) o = fail(o, "normalization");
  return o;
}

Outcome oracle_dominance(std::optional<TracedScenario>& keep) {
  Outcome o;
  const Scenario s = generate_scenario(ScenarioKind::network_mimo, {1, 2, 2}, 10.0, 0.0, 1);
  TraceOptions topt;
  topt.tol = 1e-6;
  keep = TracedScenario{s, trace_boundary(s, uniform_profiles(2, 101), topt)};
  OracleConfig cfg;
  cfg.num_samples = 100000;
  cfg.seed = 1;
  cfg.refine_fraction = 0.5;
  const RegionSample cloud = random_cloud(s, cfg);
  const DominanceReport rep = check_dominance(cloud, sample_from_boundary(s, keep->points), 1e-3);
  o.summary = std::to_string(cloud.rows.size()) + " samples, worst excess " + num(rep.worst_excess) + ", rays violated " +
              std::to_string(rep.violations) + ", front gap " + num(100.0 * rep.front_gap) + "%";
  if (!rep.passed) o = fail(o, "cloud passes the boundary");
  if (rep.front_gap > 0.02) o = fail(o, "front gap above 2%");
  return o;
}

Outcome bisection_contract(const std::vector<TracedScenario>& traced) {
  Outcome o;
  std::size_t count = 0;
  int bad_iter = 0;
  double worst_comp = 0.0;
  double worst_ray = 0.0;
  const double tol = 1e-6;
  for (const auto& ts : traced) {
    for (const auto& bp : ts.points) {
      ++count;
      const int expected = std::min(60, static_cast<int>(std::ceil(std::log2(bp.g_max / tol))));
      if (bp.iterations != expected) ++bad_iter;
      const Eigen::VectorXd g = dense_point(ts.scenario, bp.strategy);
      double ray = std::numeric_limits<double>::infinity();
      for (int k = 0; k < g.size(); ++k) {
        if (bp.profile.alpha(k) == 0.0) continue;
        worst_comp = std::max(worst_comp, std::abs(g(k) - bp.profile.alpha(k) * bp.g_sum));
        ray = std::min(ray, g(k) / bp.profile.alpha(k));
      }
      worst_ray = std::max(worst_ray, std::abs(ray - bp.g_sum));
    }
  }
  o.summary = std::to_string(count) + " points, iteration mismatches " + std::to_string(bad_iter) +
              ", max |g_k - alpha_k g_sum| " + num(worst_comp) + ", max |min g/alpha - g_sum| " + num(worst_ray);
  if (bad_iter) o = fail(o, "iteration count");
  if (worst_comp > tol) o = fail(o, "component mismatch above tol");
  if (worst_ray > tol) o = fail(o, "ray value mismatch above tol");
  return o;
}

bool valid_neighborhood(const Scenario& s, const ExplicitParams& p, double step) {
  if (strategy1(s, p).status != Strategy1Status::valid) return false;
  for (int which = 0; which < 2; ++which) {
    const Eigen::VectorXd& base = which == 0 ? p.mu : p.lambda;
    for (Eigen::Index i = 0; i < base.size(); ++i) {
      for (double sign : {-1.0, 1.0}) {
        ExplicitParams q = p;
        Eigen::VectorXd& v = which == 0 ? q.mu : q.lambda;
        v(i) = std::max(0.0, v(i) + sign * step * std::max(std::abs(v(i)), 1e-3));
        if (strategy1(s, q).status != Strategy1Status::valid) return false;
      }
    }
  }
  return true;
}

Outcome monotonicity_signs() {
  Outcome o;
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> uni(0.02, 1.0);
  int checked = 0;
  int violations = 0;
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    const Scenario s = i % 2 == 0 ? generate_scenario(ScenarioKind::miso_ic, {2, 2 + i % 3, 2}, 10.0, 0.1, 300 + i)
                                  : generate_scenario(ScenarioKind::network_mimo, {3, 1, 2}, 10.0, 0.1, 300 + i);
    int here = 0;
    for (int attempt = 0; attempt < 500 && here < 5; ++attempt) {
      Eigen::VectorXd mu(s.num_users());
      Eigen::VectorXd lambda(s.num_constraints());
      for (int k = 0; k < mu.size(); ++k) mu(k) = uni(rng);
      for (int l = 0; l < lambda.size(); ++l) lambda(l) = uni(rng);
      const ExplicitParams p = ExplicitParams::normalized(mu, lambda);
      if (!valid_neighborhood(s, p, 1e-5)) continue;
      const Corollary1Report rep = corollary1_check(s, p, 1e-5, 1e-6);
      ++here;
      ++checked;
      worst = std::max(worst, rep.worst_violation);
      if (!rep.ok()) ++violations;
    }
  }
  o.summary = std::to_string(checked) + " parameter points, sign violations " + std::to_string(violations) +
              ", worst relative violation " + num(worst);
  if (checked < 50) o = fail(o, "fewer than 50 valid points");
  if (violations) o = fail(o, "sign violated");
  return o;
}

Outcome tightness(const std::vector<TracedScenario>& traced) {
  Outcome o;
  double worst = 0.0;
  std::size_t count = 0;
  for (const auto& ts : traced) {
    for (const auto& bp : ts.points) {
      for (int k = 0; k < ts.scenario.num_users(); ++k) {
        if (bp.profile.alpha(k) == 0.0) continue;
        const double target = std::exp2(bp.profile.alpha(k) * bp.g_sum) - 1.0;
        if (!(target > 0.0)) continue;
        const double got = mp_test::dense_sinr(ts.scenario, bp.strategy, k);
        worst = std::max(worst, std::abs(got - target) / target);
        ++count;
      }
    }
  }
  o.summary = std::to_string(count) + " user targets, worst relative SINR mismatch " + num(worst);
  if (worst > 1e-4) o = fail(o, "mismatch above 1e-4");
  return o;
}

// Largest relative shortfall when the sweep front is joined by straight segments
// between consecutive nondominated points. Diagnostic only.
double interpolated_gap(const std::vector<Eigen::VectorXd>& front, const std::vector<BoundaryPoint>& pts) {
  double worst = 0.0;
  for (const auto& bp : pts) {
    const Eigen::VectorXd& a = bp.profile.alpha;
    double best = best_ray_value(front, a);
    for (std::size_t i = 0; i + 1 < front.size(); ++i) {
      // t alpha = p + s (q - p), s in [0, 1]
      const Eigen::Vector2d p = front[i];
      const Eigen::Vector2d d = front[i + 1] - front[i];
      Eigen::Matrix2d m;
      m << a(0), -d(0), a(1), -d(1);
      if (std::abs(m.determinant()) < 1e-14) continue;
      const Eigen::Vector2d ts = m.fullPivLu().solve(p);
      if (ts(1) >= 0.0 && ts(1) <= 1.0) best = std::max(best, ts(0));
    }
    if (bp.g_sum > 0.0) worst = std::max(worst, (bp.g_sum - best) / bp.g_sum);
  }
  return worst;
}

Outcome explicit_vs_trace(std::vector<TracedScenario>& traced) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const Scenario s = generate_scenario(ScenarioKind::network_mimo, {3, 1, 2}, 10.0, 0.0, 1);
  SweepOptions sopt;
  sopt.max_points = 2000000;
  const SweepResult sweep = sweep_explicit(s, 0.01, sopt);
  TraceOptions topt;
  topt.tol = 1e-6;
  const auto pts = trace_boundary(s, uniform_profiles(2, 101), topt);
  const RegionSample sample = sample_from_sweep(s, sweep);
  const GapReport gap = boundary_gap(sample, sample_from_boundary(s, pts));
  const auto front = pareto_filter(sample.points(), ParetoMode::outer);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.summary = std::to_string(sweep.total) + " grid points (" + std::to_string(sweep.skipped) + " invalid), max ray gap " +
              num(100.0 * gap.max_gap) + "% at alpha_1 = " + num(pts[gap.worst_index].profile.alpha(0)) + ", mean " +
              num(100.0 * gap.mean_gap) + "%, " + num(secs) + " s";
  std::cerr << "  diagnostic: gap with the sweep front joined by segments " << num(100.0 * interpolated_gap(front, pts))
            << "%\n";
  traced.push_back({s, pts});
  if (gap.max_gap > 0.02) o = fail(o, "gap above 2%");
  if (secs > 600.0) o = fail(o, "runtime above 10 min");
  return o;
}

Outcome impairment_monotonicity() {
  Outcome o;
  const std::vector<double> kappas = {0.0, 0.05, 0.1, 0.15, 0.2};
  const Scenario base = generate_scenario(ScenarioKind::network_mimo, {3, 1, 2}, 10.0, 0.0, 1);
  TraceOptions opt;
  opt.tol = 1e-6;
  const auto profiles = uniform_profiles(2, 21);
  std::vector<std::vector<BoundaryPoint>> runs;
  std::vector<double> mid;
  for (double k : kappas) {
    ScenarioData d = base.data();
    d.evm = Eigen::VectorXd::Constant(d.evm.size(), k);
    runs.push_back(trace_boundary(Scenario(d), profiles, opt));
    mid.push_back(runs.back()[10].point.sum());
  }
  double worst_rise = 0.0;
  for (std::size_t i = 1; i < runs.size(); ++i) {
    for (std::size_t j = 0; j < profiles.size(); ++j) {
      worst_rise = std::max(worst_rise, (runs[i][j].point - runs[i - 1][j].point).maxCoeff());
    }
  }
  bool strict = true;
  for (std::size_t i = 1; i < mid.size(); ++i) strict = strict && mid[i] < mid[i - 1] - opt.tol;
  std::ostringstream os;
  os << "sum rate at (1/2, 1/2):";
  for (double m : mid) os << ' ' << num(m);
  o.summary = os.str() + "; largest componentwise increase " + num(worst_rise);
  if (worst_rise > opt.tol) o = fail(o, "boundary grows with kappa");
  if (!strict) o = fail(o, "sum rate not strictly decreasing");
  return o;
}

Outcome invariance_suite() {
  Outcome o;
  std::vector<std::string> broken;
  // joint scaling of (mu, lambda)
  double worst_scale = 0.0;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> uni(0.05, 1.0);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Scenario s = generate_scenario(ScenarioKind::network_mimo, {3, 1, 2}, 10.0, 0.1, seed);
    Eigen::VectorXd mu(2);
    Eigen::VectorXd lambda(3);
    for (int k = 0; k < 2; ++k) mu(k) = uni(rng);
    for (int l = 0; l < 3; ++l) lambda(l) = uni(rng);
    const Eigen::VectorXd g0 = closed_form_gammas(s, mu, lambda);
    for (double t : {1e-3, 0.5, 17.0, 1e3}) {
      const Eigen::VectorXd g1 = closed_form_gammas(s, t * mu, t * lambda);
      worst_scale = std::max(worst_scale, max_relative_deviation(g1, g0));
    }
  }
  if (worst_scale > 1e-9) broken.push_back("scaling");
  // pareto_filter idempotence and permutation invariance
  bool pareto_ok = true;
  for (int t = 0; t < 20; ++t) {
    std::vector<Eigen::VectorXd> pts;
    const int dim = 2 + t % 2;
    for (int i = 0; i < 200; ++i) {
      Eigen::VectorXd v(dim);
      for (int k = 0; k < dim; ++k) v(k) = t % 4 < 2 ? uni(rng) : std::floor(uni(rng) * 6.0) / 6.0;
      pts.push_back(v);
    }
    for (ParetoMode mode : {ParetoMode::pareto, ParetoMode::outer}) {
      const auto once = pareto_filter(pts, mode);
      auto shuffled = pts;
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      pareto_ok = pareto_ok && pareto_filter(once, mode) == once && pareto_filter(shuffled, mode) == once;
    }
  }
  if (!pareto_ok) broken.push_back("pareto filter");
  // seed determinism of every randomized path
  bool det = fingerprint(generate_scenario(ScenarioKind::miso_ic, {2, 3, 2}, 10.0, 0.1, 77)) ==
                 fingerprint(generate_scenario(ScenarioKind::miso_ic, {2, 3, 2}, 10.0, 0.1, 77)) &&
             fingerprint(generate_scenario(ScenarioKind::miso_ic, {2, 3, 2}, 10.0, 0.1, 77)) !=
                 fingerprint(generate_scenario(ScenarioKind::miso_ic, {2, 3, 2}, 10.0, 0.1, 78));
  const auto r1 = random_profiles(3, 50, 4);
  const auto r2 = random_profiles(3, 50, 4);
  for (std::size_t i = 0; i < r1.size(); ++i) det = det && r1[i].alpha == r2[i].alpha;
  const Scenario s = generate_scenario(ScenarioKind::network_mimo, {2, 1, 2}, 10.0, 0.1, 5);
  OracleConfig a;
  a.num_samples = 20000;
  a.refine_fraction = 0.5;
  a.chunk = 2000;
  a.threads = 1;
  OracleConfig b = a;
  b.threads = 3;
  det = det && sample_to_csv(random_cloud(s, a)) == sample_to_csv(random_cloud(s, b));
  SweepOptions s1;
  s1.threads = 1;
  SweepOptions s3;
  s3.threads = 3;
  det = det && sample_to_csv(sample_from_sweep(s, sweep_explicit(s, 0.02, s1))) ==
                   sample_to_csv(sample_from_sweep(s, sweep_explicit(s, 0.02, s3)));
  TraceOptions t1;
  t1.threads = 1;
  TraceOptions t3;
  t3.threads = 3;
  const auto prof = random_profiles(2, 9, 3);
  det = det && sample_to_csv(sample_from_boundary(s, trace_boundary(s, prof, t1))) ==
                   sample_to_csv(sample_from_boundary(s, trace_boundary(s, prof, t3)));
  if (!det) broken.push_back("determinism");
  o.summary = "scaling deviation " + num(worst_scale) + ", pareto filter " + (pareto_ok ? "stable" : "unstable") +
              ", seeded paths " + (det ? "reproducible" : "not reproducible");
  for (const auto& b2 : broken) o = fail(o, b2 + " broken");
  return o;
}

}  // namespace

int main() {
  std::vector<TracedScenario> traced;
  std::optional<TracedScenario> crit3;
  int failed = 0;
  auto report = [&](int id, const std::string& name, const std::function<Outcome()>& f) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o = fail(o, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.passed) ++failed;
    std::cout << (o.passed ? "PASS" : "FAIL") << " criterion " << id << " (" << name << "): " << o.summary << " ["
              << num(secs) << " s]" << std::endl;
  };
  report(1, "scalar chain", scalar_chain);
  report(2, "duality round trip", [&] { return duality_round_trip(traced); });
  report(3, "oracle dominance", [&] { return oracle_dominance(crit3); });
  if (crit3) traced.push_back(*crit3);
  report(7, "explicit sweep vs trace", [&] { return explicit_vs_trace(traced); });
  report(4, "bisection contract", [&] { return bisection_contract(traced); });
  report(5, "monotonicity signs", monotonicity_signs);
  report(6, "boundary tightness", [&] { return tightness(traced); });
  report(8, "impairment monotonicity", impairment_monotonicity);
  report(9, "invariance suite", invariance_suite);
  return failed == 0 ? 0 : 1;
}
