// Copyright 2026 The mimo_pareto Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mimo_pareto/explicit_param.hpp"
#include "mimo_pareto/feasibility.hpp"
#include "mimo_pareto/linalg.hpp"
#include "mimo_pareto/parallel.hpp"
#include "mimo_pareto/scenario.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace mimo_pareto {

/// Direction of a ray in performance space: nonnegative, unit L1 norm.
struct FairnessProfile {
  Eigen::VectorXd alpha;

  /// Normalize to unit sum; entries below 1e-9 after normalization become exactly 0.
  static FairnessProfile from(const Eigen::VectorXd& v) {
    if (v.size() == 0) throw ValidationError("profile: empty");
    if ((v.array() < 0.0).any() || !v.allFinite()) throw ValidationError("profile: entries must be nonnegative");
    if (!(v.sum() > 0.0)) throw ValidationError("profile: at least one entry must be positive");
    Eigen::VectorXd a = v / v.sum();
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      if (a(i) < 1e-9) a(i) = 0.0;
    }
    return {a / a.sum()};
  }

  int size() const { return static_cast<int>(alpha.size()); }
};

/// `count` evenly spaced profiles. For two users this is alpha = (i/(count-1), 1 - i/(count-1)).
/// For more users the simplex grid with count-1 parts per coordinate.
inline std::vector<FairnessProfile> uniform_profiles(int users, int count) {
  if (users <= 0) throw ValidationError("uniform_profiles: users must be positive");
  if (users == 1) return {FairnessProfile::from(Eigen::VectorXd::Ones(1))};
  if (count < 2) throw ValidationError("uniform_profiles: need at least two profiles");
  std::vector<FairnessProfile> out;
  for (const auto& v : simplex_grid(users, count - 1)) out.push_back(FairnessProfile::from(v));
  return out;
}

/// Uniformly distributed profiles on the simplex.
inline std::vector<FairnessProfile> random_profiles(int users, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> expo(1.0);
  std::vector<FairnessProfile> out;
  for (int i = 0; i < count; ++i) {
    Eigen::VectorXd v(users);
    for (int k = 0; k < users; ++k) v(k) = expo(rng);
    out.push_back(FairnessProfile::from(v));
  }
  return out;
}

/// Upper bound on the transmit power any feasible strategy can give user k. Takes the
/// larger of two bounds: the smallest positive eigenvalue rule
/// 1 / max_l eig+(D Q_lk D / (q_l tr D)) and the always valid L / lambda_min(sum_l Q_lk / q_l).
inline double user_power_bound(const Scenario& s, int k) {
  const auto& sup = s.data_support(k);
  if (sup.empty()) return 0.0;
  const double trd = static_cast<double>(sup.size());
  double nu = 0.0;
  Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(sup.size()), static_cast<Eigen::Index>(sup.size()));
  for (int l = 0; l < s.num_constraints(); ++l) {
    const Eigen::MatrixXcd q = detail::restrict(s.weight(l, k), sup) / s.constraint(l).limit;
    nu = std::max(nu, linalg::smallest_positive_eigenvalue(q / trd));
    sum += q;
  }
  double bound = nu > 0.0 ? 1.0 / nu : 0.0;
  const double lmin = linalg::min_eigenvalue(sum);
  if (lmin > 0.0) bound = std::max(bound, s.num_constraints() / lmin);
  return bound;
}

/// Upper bound on the sum performance g_sum along any profile.
inline double g_max_bound(const Scenario& s) {
  double total = 0.0;
  for (int k = 0; k < s.num_users(); ++k) {
    const double gain = detail::restrict(s.channel(k), s.data_support(k)).squaredNorm();
    total += g(s.metric(k), gain * user_power_bound(s, k) / s.noise(k));
  }
  return total;
}

inline double g_max_bound(const Scenario& s, const FairnessProfile& /*profile*/) { return g_max_bound(s); }

/// Rescale raw multipliers so that sum(mu) + sum(lambda) = 2, check that both sums
/// are one, and return them normalized.
inline ExplicitParams duals_to_explicit(const Eigen::VectorXd& mu, const Eigen::VectorXd& lambda, double tol = 1e-3) {
  const double total = mu.sum() + lambda.sum();
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw DualNormalizationError("dual extraction: multipliers are all zero");
  }
  const Eigen::VectorXd m = mu * (2.0 / total);
  const Eigen::VectorXd l = lambda * (2.0 / total);
  if (std::abs(m.sum() - 1.0) > tol || std::abs(l.sum() - 1.0) > tol) {
    throw DualNormalizationError("dual extraction: sum(mu) = " + std::to_string(m.sum()) +
                                 " and sum(lambda) = " + std::to_string(l.sum()) + " after rescaling; expected both 1");
  }
  return ExplicitParams::normalized(m, l);
}

struct TraceOptions {
  double tol = 1e-5;
  int max_iterations = 60;
  bool power_resolve = true;
  SolverSettings solver_settings;
  std::shared_ptr<const ConicSolver> solver;  // default_solver() when empty
  unsigned threads = 0;
};

struct BoundaryPoint {
  FairnessProfile profile;
  double g_sum = 0.0;
  double g_max = 0.0;
  double bracket_width = 0.0;
  int iterations = 0;
  Eigen::VectorXd point;   // performance of `strategy`
  Eigen::VectorXd sinr;
  Eigen::VectorXd usage;
  BeamformingStrategy strategy;
  Eigen::VectorXd raw_mu;  // multipliers of the last feasible solve
  Eigen::VectorXd raw_lambda;
  std::optional<ExplicitParams> duals;
  bool weak_pareto = false;  // some served user carries a vanishing priority weight
  bool power_resolved = false;
  std::vector<std::string> warnings;
};

namespace detail {

inline FeasibilityResult solve_with_retry(const FeasibilityModel& model, const Eigen::VectorXd& gammas,
                                          const ConicSolver& solver, const SolverSettings& set,
                                          std::vector<std::string>& warnings) {
  FeasibilityResult r = solve_feasibility(model, gammas, solver, set);
  if (r.status != FeasibilityStatus::solver_failure) return r;
  r = solve_feasibility(model, gammas, solver, set.tightened());
  if (r.status == FeasibilityStatus::solver_failure) {
    warnings.push_back("solver failure treated as infeasible: " + r.message);
    r.status = FeasibilityStatus::infeasible;
  }
  return r;
}

}  // namespace detail

/// Largest g_sum with g_k(SINR_k) >= alpha_k g_sum for all k, by bisection on
/// [0, g_max] with ceil(log2(g_max / tol)) feasibility tests.
inline BoundaryPoint trace_point(const FeasibilityModel& model, const FairnessProfile& profile,
                                 const TraceOptions& opt = {}) {
  const Scenario& s = model.scenario();
  if (!(opt.tol > 0.0)) throw ValidationError("trace_point: tol must be positive");
  if (profile.size() != s.num_users()) throw ValidationError("trace_point: profile length must equal the number of users");
  const ConicSolver& solver = opt.solver ? *opt.solver : *default_solver();
  const int kr = s.num_users();

  BoundaryPoint bp;
  bp.profile = profile;
  bp.g_max = g_max_bound(s);
  bp.strategy = zero_strategy(s);
  bp.raw_mu = Eigen::VectorXd::Zero(kr);
  bp.raw_lambda = Eigen::VectorXd::Zero(s.num_constraints());

  auto targets_for = [&](double gsum, bool& reachable) {
    Eigen::VectorXd gam = Eigen::VectorXd::Zero(kr);
    reachable = true;
    for (int k = 0; k < kr; ++k) {
      if (profile.alpha(k) == 0.0) continue;
      try {
        gam(k) = g_inverse(s.metric(k), profile.alpha(k) * gsum);
      } catch (const OutOfRangeError&) {
        reachable = false;
      }
    }
    return gam;
  };

  double lo = 0.0;
  double hi = bp.g_max;
  int n = 0;
  if (bp.g_max > opt.tol) n = static_cast<int>(std::ceil(std::log2(bp.g_max / opt.tol)));
  n = std::min(n, opt.max_iterations);
  std::optional<FeasibilityResult> best;
  for (int i = 0; i < n; ++i) {
    const double mid = 0.5 * (lo + hi);
    bool reachable = true;
    const Eigen::VectorXd gam = targets_for(mid, reachable);
    bool ok = false;
    if (reachable) {
      FeasibilityResult r = detail::solve_with_retry(model, gam, solver, opt.solver_settings, bp.warnings);
      if (r.feasible()) {
        ok = true;
        best = std::move(r);
      }
    }
    if (ok) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  bp.iterations = n;
  bp.g_sum = lo;
  bp.bracket_width = hi - lo;

  if (best) {
    bp.strategy = best->strategy;
    bp.raw_mu = best->mu;
    bp.raw_lambda = best->lambda;
    if (best->duals_valid) {
      try {
        bp.duals = duals_to_explicit(best->mu, best->lambda);
      } catch (const DualNormalizationError& e) {
        bp.warnings.push_back(e.what());
      }
    }
    if (opt.power_resolve) {
      bool reachable = true;
      const Eigen::VectorXd gam = targets_for(lo, reachable);
      std::vector<bool> active(static_cast<std::size_t>(kr));
      for (int k = 0; k < kr; ++k) active[static_cast<std::size_t>(k)] = gam(k) > 0.0;
      const PowerSolve ps = fixed_direction_powers(s, bp.strategy.directions, gam, active);
      const double scale = std::max(1.0, ps.powers.cwiseAbs().maxCoeff());
      if (ps.residual <= 1e-6 && ps.powers.minCoeff() >= -1e-9 * scale) {
        BeamformingStrategy st = bp.strategy;
        st.powers = ps.powers.cwiseMax(0.0);
        const double c = constraint_usage(s, st).max;
        if (c <= 1.0 + 1e-6) {
          if (c > 1.0) st.powers /= c;
          bp.strategy = std::move(st);
          bp.power_resolved = true;
        }
      }
      if (!bp.power_resolved) bp.warnings.push_back("power re-solve rejected; keeping the cone solution");
    }
  }
  if (bp.duals) {
    for (int k = 0; k < kr; ++k) {
      if (profile.alpha(k) > 0.0 && bp.duals->mu(k) < 1e-6) bp.weak_pareto = true;
    }
  }
  bp.sinr = sinrs(s, bp.strategy);
  bp.point = performance_from_sinr(s, bp.sinr);
  bp.usage = constraint_usage(s, bp.strategy).ratios;
  return bp;
}

inline BoundaryPoint trace_point(const Scenario& s, const FairnessProfile& profile, const TraceOptions& opt = {}) {
  return trace_point(FeasibilityModel(s), profile, opt);
}

/// Trace every profile independently (in parallel); output order follows the input.
/// Points weakly dominated by another traced point are flagged as weakly Pareto.
inline std::vector<BoundaryPoint> trace_boundary(const Scenario& s, const std::vector<FairnessProfile>& profiles,
                                                 const TraceOptions& opt = {}) {
  const FeasibilityModel model(s);
  std::vector<BoundaryPoint> out(profiles.size());
  parallel_for(profiles.size(), opt.threads, [&](std::size_t i) { out[i] = trace_point(model, profiles[i], opt); });
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t j = 0; j < out.size(); ++j) {
      if (i == j) continue;
      const Eigen::VectorXd diff = out[j].point - out[i].point;
      if (diff.minCoeff() >= -opt.tol && diff.maxCoeff() > 10.0 * opt.tol) {
        out[i].weak_pareto = true;
        break;
      }
    }
  }
  return out;
}

}  // namespace mimo_pareto
