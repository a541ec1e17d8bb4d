// Copyright 2026 The mimo_pareto Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mimo_pareto/linalg.hpp"
#include "mimo_pareto/parallel.hpp"
#include "mimo_pareto/scenario.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace mimo_pareto {

/// Priority weights mu (one per user) and constraint weights lambda (one per power
/// constraint) that parametrize the closed-form transmit strategy.
struct ExplicitParams {
  Eigen::VectorXd mu;
  Eigen::VectorXd lambda;

  /// Validate and scale both vectors to unit sum.
  static ExplicitParams normalized(const Eigen::VectorXd& mu, const Eigen::VectorXd& lambda) {
    if (mu.size() == 0 || lambda.size() == 0) throw ValidationError("explicit params: mu and lambda must be non-empty");
    if ((mu.array() < 0.0).any() || (lambda.array() < 0.0).any() || !mu.allFinite() || !lambda.allFinite()) {
      throw ValidationError("explicit params: entries must be nonnegative");
    }
    if (!(mu.sum() > 0.0)) throw ValidationError("explicit params: at least one mu must be positive");
    if (!(lambda.sum() > 0.0)) throw ValidationError("explicit params: at least one lambda must be positive");
    return {mu / mu.sum(), lambda / lambda.sum()};
  }

  /// Equal priorities and equal constraint weights. With a single total power
  /// constraint and equal noise levels this reproduces signal-to-leakage-and-noise
  /// beamforming directions.
  static ExplicitParams uniform(int users, int constraints) {
    return normalized(Eigen::VectorXd::Ones(users), Eigen::VectorXd::Ones(constraints));
  }

  bool is_normalized(double tol = 1e-12) const {
    return std::abs(mu.sum() - 1.0) <= tol && std::abs(lambda.sum() - 1.0) <= tol;
  }
};

enum class Strategy1Status { valid, invalid_powers, singular_coupling };

inline std::string to_string(Strategy1Status s) {
  switch (s) {
    case Strategy1Status::valid: return "valid";
    case Strategy1Status::invalid_powers: return "invalid-powers";
    case Strategy1Status::singular_coupling: return "singular-coupling";
  }
  return "valid";
}

struct Strategy1Result {
  BeamformingStrategy strategy;
  Eigen::VectorXd gammas;   // SINR each user attains when the powers are valid
  Eigen::MatrixXd coupling; // K_r x K_r power-coupling matrix; rows/cols of inactive users are zero
  std::vector<bool> active;
  Strategy1Status status = Strategy1Status::valid;
};

/// Psi_k restricted to the antennas serving user k. Accepts unnormalized weights.
inline Eigen::MatrixXcd psi_matrix(const Scenario& s, const Eigen::VectorXd& mu, const Eigen::VectorXd& lambda, int k) {
  const auto& sup = s.data_support(k);
  const auto nk = static_cast<Eigen::Index>(sup.size());
  Eigen::MatrixXcd psi = Eigen::MatrixXcd::Zero(nk, nk);
  const Eigen::VectorXd& kappa = s.evm();
  for (int j = 0; j < s.num_users(); ++j) {
    const double weight = mu(j) / s.noise(j);
    if (weight == 0.0) continue;
    const auto& h = s.channel(j);
    const auto& cmask = s.coord_mask(j);
    Eigen::VectorXcd a(nk);
    for (Eigen::Index i = 0; i < nk; ++i) {
      const int n = sup[static_cast<std::size_t>(i)];
      a(i) = cmask[static_cast<std::size_t>(n)] ? h(n) : Complex(0.0);
    }
    psi.noalias() += weight * a * a.adjoint();
    for (Eigen::Index i = 0; i < nk; ++i) {
      const double kap = kappa(sup[static_cast<std::size_t>(i)]);
      if (kap != 0.0) psi(i, i) += weight * kap * kap * std::norm(a(i));
    }
  }
  for (int l = 0; l < s.num_constraints(); ++l) {
    const double weight = lambda(l) / s.constraint(l).limit;
    if (weight == 0.0) continue;
    psi += weight * detail::restrict(s.weight(l, k), sup);
  }
  return psi;
}

namespace detail {

struct Directions {
  std::vector<Eigen::VectorXcd> w;
  Eigen::VectorXd gammas;
  std::vector<bool> active;
};

// Beamforming directions and SINR values of the closed-form strategy; no power solve.
inline Directions closed_form_directions(const Scenario& s, const Eigen::VectorXd& mu, const Eigen::VectorXd& lambda) {
  const int kr = s.num_users();
  Directions out;
  out.gammas = Eigen::VectorXd::Zero(kr);
  out.active.assign(static_cast<std::size_t>(kr), false);
  for (int k = 0; k < kr; ++k) out.w.push_back(idle_direction(s, k));
  for (int k = 0; k < kr; ++k) {
    if (!(mu(k) > 0.0)) continue;
    const auto& sup = s.data_support(k);
    if (sup.empty()) continue;
    const Eigen::MatrixXcd psi = psi_matrix(s, mu, lambda, k);
    const Eigen::VectorXcd b = restrict(s.channel(k), sup);
    const Eigen::MatrixXcd psi_pinv = linalg::hermitian_pinv(psi);
    const Eigen::VectorXcd x = psi_pinv * b;
    const double xn = x.norm();
    if (!(xn > 1e-14 * (psi_pinv.norm() * b.norm())) || xn == 0.0) continue;
    const double own = mu(k) / s.noise(k);
    const Eigen::MatrixXcd rest = psi - own * b * b.adjoint();
    const double gamma = own * std::real(b.dot(linalg::hermitian_pinv(rest) * b));
    if (!(gamma > 0.0) || !std::isfinite(gamma)) continue;
    out.w[static_cast<std::size_t>(k)] = embed(x / xn, sup, s.num_antennas());
    out.gammas(k) = gamma;
    out.active[static_cast<std::size_t>(k)] = true;
  }
  return out;
}

}  // namespace detail

/// Coupling matrix between fixed directions and SINR targets: row i describes what
/// user i's power does to every user's SINR equation. Inactive users get zero rows
/// and columns.
inline Eigen::MatrixXd coupling_matrix(const Scenario& s, const std::vector<Eigen::VectorXcd>& w,
                                       const Eigen::VectorXd& gammas, const std::vector<bool>& active) {
  const int kr = s.num_users();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(kr, kr);
  const Eigen::VectorXd kappa2 = s.evm().cwiseAbs2();
  for (int i = 0; i < kr; ++i) {
    if (!active[static_cast<std::size_t>(i)]) continue;
    const auto& wi = w[static_cast<std::size_t>(i)];
    for (int j = 0; j < kr; ++j) {
      if (!active[static_cast<std::size_t>(j)]) continue;
      const auto& hj = s.channel(j);
      const auto& cmask = s.coord_mask(j);
      double distortion = 0.0;
      for (int n : s.data_support(i)) {
        if (cmask[static_cast<std::size_t>(n)] && kappa2(n) != 0.0) distortion += kappa2(n) * std::norm(hj(n)) * std::norm(wi(n));
      }
      const double gain = std::norm(detail::coupling(s, j, i, wi));
      if (i == j) {
        m(i, i) = gain - gammas(i) * distortion;
      } else {
        m(i, j) = -gammas(j) * (gain + distortion);
      }
    }
  }
  return m;
}

struct PowerSolve {
  Eigen::VectorXd powers;  // zero for inactive users
  double residual = 0.0;   // relative residual of the SINR equations
};

/// Powers that make every active user's SINR equal its target for fixed directions.
inline PowerSolve fixed_direction_powers(const Scenario& s, const std::vector<Eigen::VectorXcd>& w,
                                         const Eigen::VectorXd& gammas, const std::vector<bool>& active) {
  const int kr = s.num_users();
  std::vector<int> idx;
  for (int k = 0; k < kr; ++k) {
    if (active[static_cast<std::size_t>(k)]) idx.push_back(k);
  }
  PowerSolve out;
  out.powers = Eigen::VectorXd::Zero(kr);
  if (idx.empty()) return out;
  const Eigen::MatrixXd full = coupling_matrix(s, w, gammas, active);
  const auto na = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd m(na, na);
  Eigen::VectorXd rhs(na);
  for (Eigen::Index a = 0; a < na; ++a) {
    rhs(a) = gammas(idx[static_cast<std::size_t>(a)]) * s.noise(idx[static_cast<std::size_t>(a)]);
    for (Eigen::Index b = 0; b < na; ++b) m(a, b) = full(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
  }
  // Row-vector system p M = gamma sigma^2, i.e. M^T p = gamma sigma^2.
  const Eigen::MatrixXd mt = m.transpose();
  const Eigen::VectorXd p = linalg::pinv(mt) * rhs;
  out.residual = (mt * p - rhs).norm() / std::max(rhs.norm(), std::numeric_limits<double>::min());
  for (Eigen::Index a = 0; a < na; ++a) out.powers(idx[static_cast<std::size_t>(a)]) = p(a);
  return out;
}

/// The closed-form transmit strategy for given priority and constraint weights.
inline Strategy1Result strategy1(const Scenario& s, const ExplicitParams& params) {
  if (params.mu.size() != s.num_users() || params.lambda.size() != s.num_constraints()) {
    throw ValidationError("strategy1: parameter dimensions do not match the scenario");
  }
  detail::Directions dirs = detail::closed_form_directions(s, params.mu, params.lambda);
  Strategy1Result r;
  r.gammas = dirs.gammas;
  r.active = dirs.active;
  r.coupling = coupling_matrix(s, dirs.w, dirs.gammas, dirs.active);
  const PowerSolve ps = fixed_direction_powers(s, dirs.w, dirs.gammas, dirs.active);

  Eigen::VectorXd p = ps.powers;
  const double scale = std::max(1.0, p.cwiseAbs().maxCoeff());
  if (ps.residual > 1e-6) r.status = Strategy1Status::singular_coupling;
  for (int k = 0; k < s.num_users(); ++k) {
    if (p(k) < -1e-9 * scale) {
      if (r.status == Strategy1Status::valid) r.status = Strategy1Status::invalid_powers;
    } else if (p(k) < 0.0) {
      p(k) = 0.0;
    }
  }
  r.strategy.directions = std::move(dirs.w);
  r.strategy.powers = p.cwiseMax(0.0);
  return r;
}

struct Strategy2Result {
  BeamformingStrategy strategy;
  double c = 0.0;  // max_l usage before scaling
  Strategy1Status status = Strategy1Status::valid;
};

/// Scale a strategy down to the feasible set; never scales up.
inline Strategy2Result scale_to_feasible(const Scenario& s, const BeamformingStrategy& st) {
  Strategy2Result r;
  r.strategy = st;
  r.c = constraint_usage(s, st).max;
  if (r.c > 1.0) r.strategy.powers /= r.c;
  return r;
}

/// Closed-form strategy followed by the feasibility scaling.
inline Strategy2Result strategy2(const Scenario& s, const ExplicitParams& params) {
  const Strategy1Result s1 = strategy1(s, params);
  Strategy2Result r = scale_to_feasible(s, s1.strategy);
  r.status = s1.status;
  return r;
}

/// SINR targets of the closed-form strategy for raw (not renormalized) weights.
inline Eigen::VectorXd closed_form_gammas(const Scenario& s, const Eigen::VectorXd& mu, const Eigen::VectorXd& lambda) {
  return detail::closed_form_directions(s, mu, lambda).gammas;
}

struct Corollary1Report {
  Eigen::VectorXd gammas;
  Eigen::MatrixXd d_mu;      // (k, j) = d gamma_k / d mu_j
  Eigen::MatrixXd d_lambda;  // (k, l) = d gamma_k / d lambda_l
  bool own_nonnegative = true;
  bool cross_nonpositive = true;
  bool lambda_nonpositive = true;
  double worst_violation = 0.0;  // largest violation relative to |gamma_k|

  bool ok() const { return own_nonnegative && cross_nonpositive && lambda_nonpositive; }
};

/// Finite-difference check of the monotonicity of each user's SINR in the weights:
/// increasing the own priority never hurts, increasing another user's priority or
/// any constraint weight never helps. Partials are taken without renormalization.
inline Corollary1Report corollary1_check(const Scenario& s, const ExplicitParams& params, double step = 1e-5,
                                         double rel_tol = 1e-6) {
  if (!(step >= 1e-10) || !(step <= 1e-1)) {
    throw ValidationError("corollary1_check: relative step must lie in [1e-10, 1e-1]");
  }
  if (strategy1(s, params).status != Strategy1Status::valid) {
    throw ValidationError("corollary1_check: strategy is not valid at the given parameters");
  }
  const int kr = s.num_users();
  const int nl = s.num_constraints();
  Corollary1Report rep;
  rep.gammas = closed_form_gammas(s, params.mu, params.lambda);
  rep.d_mu = Eigen::MatrixXd::Zero(kr, kr);
  rep.d_lambda = Eigen::MatrixXd::Zero(kr, nl);

  auto partial = [&](bool is_mu, int idx) {
    Eigen::VectorXd mu = params.mu;
    Eigen::VectorXd lambda = params.lambda;
    double& theta = is_mu ? mu(idx) : lambda(idx);
    const double base = theta;
    const double h = step * std::max(std::abs(base), 1e-3);
    Eigen::VectorXd up;
    Eigen::VectorXd down;
    double width = 0.0;
    theta = base + h;
    up = closed_form_gammas(s, mu, lambda);
    if (base - h >= 0.0) {
      theta = base - h;
      down = closed_form_gammas(s, mu, lambda);
      width = 2.0 * h;
    } else {
      down = rep.gammas;
      width = h;
    }
    return Eigen::VectorXd((up - down) / width);
  };

  for (int j = 0; j < kr; ++j) rep.d_mu.col(j) = partial(true, j);
  for (int l = 0; l < nl; ++l) rep.d_lambda.col(l) = partial(false, l);

  for (int k = 0; k < kr; ++k) {
    const double tol = rel_tol * std::abs(rep.gammas(k));
    const double scale = std::max(std::abs(rep.gammas(k)), std::numeric_limits<double>::min());
    for (int j = 0; j < kr; ++j) {
      const double d = rep.d_mu(k, j);
      if (j == k && d < -tol) {
        rep.own_nonnegative = false;
        rep.worst_violation = std::max(rep.worst_violation, -d / scale);
      }
      if (j != k && d > tol) {
        rep.cross_nonpositive = false;
        rep.worst_violation = std::max(rep.worst_violation, d / scale);
      }
    }
    for (int l = 0; l < nl; ++l) {
      const double d = rep.d_lambda(k, l);
      if (d > tol) {
        rep.lambda_nonpositive = false;
        rep.worst_violation = std::max(rep.worst_violation, d / scale);
      }
    }
  }
  return rep;
}

/// All compositions of `parts` into `dims` nonnegative integers, divided by parts.
/// Lexicographic order, so entries sum to exactly one.
inline std::vector<Eigen::VectorXd> simplex_grid(int dims, int parts) {
  if (dims <= 0 || parts <= 0) throw ValidationError("simplex_grid: dims and parts must be positive");
  std::vector<Eigen::VectorXd> out;
  std::vector<int> c(static_cast<std::size_t>(dims), 0);
  // Recursive enumeration with the last coordinate taking the remainder.
  auto rec = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == dims - 1) {
      c[static_cast<std::size_t>(pos)] = remaining;
      Eigen::VectorXd v(dims);
      for (int i = 0; i < dims; ++i) v(i) = static_cast<double>(c[static_cast<std::size_t>(i)]) / parts;
      out.push_back(v);
      return;
    }
    for (int x = 0; x <= remaining; ++x) {
      c[static_cast<std::size_t>(pos)] = x;
      self(self, pos + 1, remaining - x);
    }
  };
  rec(rec, 0, parts);
  return out;
}

inline double simplex_grid_size(int dims, int parts) {
  // C(parts + dims - 1, dims - 1) in floating point so huge grids do not overflow.
  double r = 1.0;
  for (int i = 1; i < dims; ++i) r = r * (parts + i) / i;
  return r;
}

inline int grid_parts(double step) {
  if (!(step > 0.0) || !(step <= 1.0)) throw ValidationError("grid step must lie in (0, 1]");
  return static_cast<int>(std::ceil(1.0 / step - 1e-9));
}

struct SweepOptions {
  std::size_t max_points = 5'000'000;
  bool keep_strategies = false;
  bool keep_invalid = false;
  unsigned threads = 0;
};

struct SweepEntry {
  ExplicitParams params;
  Strategy1Status status = Strategy1Status::valid;
  Eigen::VectorXd point;  // performance after the feasibility scaling; empty when invalid
  Eigen::VectorXd sinr;
  double c = 0.0;
  Eigen::VectorXd usage;  // per-constraint usage after scaling
  std::optional<BeamformingStrategy> strategy;
};

struct SweepResult {
  std::vector<SweepEntry> entries;  // grid order
  std::size_t total = 0;
  std::size_t skipped = 0;
};

/// Evaluate the feasibility-scaled closed-form strategy on a uniform grid over the
/// product of the priority simplex and the constraint-weight simplex.
inline SweepResult sweep_explicit(const Scenario& s, double grid_step, const SweepOptions& opt = {}) {
  const int parts = grid_parts(grid_step);
  const double n_mu = simplex_grid_size(s.num_users(), parts);
  const double n_lambda = simplex_grid_size(s.num_constraints(), parts);
  if (n_mu * n_lambda > static_cast<double>(opt.max_points)) {
    throw ValidationError("sweep_explicit: grid of " + std::to_string(n_mu * n_lambda) +
                          " points exceeds the cap of " + std::to_string(opt.max_points));
  }
  const auto mus = simplex_grid(s.num_users(), parts);
  const auto lambdas = simplex_grid(s.num_constraints(), parts);
  const std::size_t total = mus.size() * lambdas.size();

  std::vector<SweepEntry> slots(total);
  parallel_for(total, opt.threads, [&](std::size_t i) {
    SweepEntry& e = slots[i];
    e.params = {mus[i / lambdas.size()], lambdas[i % lambdas.size()]};
    const Strategy2Result r = strategy2(s, e.params);
    e.status = r.status;
    e.c = r.c;
    if (r.status != Strategy1Status::valid) return;
    e.sinr = sinrs(s, r.strategy);
    e.point = performance_from_sinr(s, e.sinr);
    e.usage = constraint_usage(s, r.strategy).ratios;
    if (opt.keep_strategies) e.strategy = r.strategy;
  });

  SweepResult out;
  out.total = total;
  for (auto& e : slots) {
    if (e.status != Strategy1Status::valid) {
      ++out.skipped;
      if (!opt.keep_invalid) continue;
    }
    out.entries.push_back(std::move(e));
  }
  return out;
}

}  // namespace mimo_pareto
