// Copyright 2026 The mimo_pareto Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mimo_pareto/cone_program.hpp"
#include "mimo_pareto/interior_point.hpp"
#include "mimo_pareto/linalg.hpp"
#include "mimo_pareto/scenario.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <memory>
#include <string>
#include <vector>

namespace mimo_pareto {

/// Which users appear in an assembled program and where their variables live.
struct FeasibilityLayout {
  std::vector<int> active;             // users with a positive SINR target
  std::vector<int> var_offset;         // per user; -1 when inactive
  int t_index = 0;                     // column of the power scaling variable
  std::vector<int> sinr_cone;          // per user: index into soc_dims, -1 when inactive
  std::vector<int> power_cone;         // per constraint: index into soc_dims
  std::vector<int> cone_offset;        // row offset of every cone in G
};

/// SINR-target feasibility as a second-order cone program. The program minimizes the
/// common power scaling t subject to
///   SINR_k >= gamma_k                    for every user with gamma_k > 0
///   sum_k v_k^H Q_lk v_k <= t q_l        for every constraint l
/// and the targets are feasible exactly when the optimal t is at most one. The
/// beamformers v_k = sqrt(p_k) w_k are lifted to real coordinates [Re v; Im v] on the
/// antennas that serve user k; the common phase is fixed by Im(h_k^H D_k v_k) = 0.
class FeasibilityModel {
 public:
  explicit FeasibilityModel(const Scenario& s) : s_(s) {
    const int kr = s.num_users();
    const int nl = s.num_constraints();
    factors_.resize(static_cast<std::size_t>(nl));
    for (int l = 0; l < nl; ++l) {
      for (int k = 0; k < kr; ++k) {
        factors_[static_cast<std::size_t>(l)].push_back(
            linalg::psd_factor(detail::restrict(s.weight(l, k), s.data_support(k))));
      }
    }
  }

  const Scenario& scenario() const { return s_; }

  /// Assemble the program for the given SINR targets (zero targets drop the user).
  ConeProgram build(const Eigen::VectorXd& gammas, FeasibilityLayout* layout_out = nullptr) const {
    const Scenario& s = s_;
    const int kr = s.num_users();
    const int nl = s.num_constraints();
    if (gammas.size() != kr) throw ValidationError("feasibility: one SINR target per user required");
    FeasibilityLayout lay;
    lay.var_offset.assign(static_cast<std::size_t>(kr), -1);
    lay.sinr_cone.assign(static_cast<std::size_t>(kr), -1);
    int nvar = 0;
    for (int k = 0; k < kr; ++k) {
      if (!(gammas(k) >= 0.0) || !std::isfinite(gammas(k))) throw ValidationError("feasibility: targets must be finite and nonnegative");
      if (gammas(k) > 0.0) {
        lay.active.push_back(k);
        lay.var_offset[static_cast<std::size_t>(k)] = nvar;
        nvar += 2 * static_cast<int>(s.data_support(k).size());
      }
    }
    lay.t_index = nvar;
    const int n = nvar + 1;
    const Eigen::VectorXd kappa = s.evm();

    // Rows are collected as (constant, coefficient row) pairs: cone entry = f + F x.
    struct Row {
      double f = 0.0;
      Eigen::RowVectorXd F;
    };
    auto zero_row = [&] { return Row{0.0, Eigen::RowVectorXd::Zero(n)}; };
    std::vector<std::vector<Row>> cones;

    // Real and imaginary parts of a^H v_j for a supported on S_j.
    auto add_inner = [&](Row& re, Row& im, int j, const Eigen::VectorXcd& a, double scale) {
      const int off = lay.var_offset[static_cast<std::size_t>(j)];
      const auto nj = a.size();
      for (Eigen::Index i = 0; i < nj; ++i) {
        re.F(off + i) += scale * a(i).real();
        re.F(off + nj + i) += scale * a(i).imag();
        im.F(off + i) -= scale * a(i).imag();
        im.F(off + nj + i) += scale * a(i).real();
      }
    };

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(lay.active.size()), n);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(lay.active.size()));

    for (std::size_t a = 0; a < lay.active.size(); ++a) {
      const int k = lay.active[a];
      const auto& hk = s.channel(k);
      const auto& cmask = s.coord_mask(k);
      std::vector<Row> cone;
      Row sig = zero_row();
      Row phase = zero_row();
      add_inner(sig, phase, k, detail::restrict(hk, s.data_support(k)), 1.0 / std::sqrt(gammas(k)));
      A.row(static_cast<Eigen::Index>(a)) = phase.F * std::sqrt(gammas(k));
      cone.push_back(sig);
      cone.push_back(Row{std::sqrt(s.noise(k)), Eigen::RowVectorXd::Zero(n)});
      for (int j : lay.active) {
        if (j == k) continue;
        const auto& sup = s.data_support(j);
        Eigen::VectorXcd leak(static_cast<Eigen::Index>(sup.size()));
        bool any = false;
        for (std::size_t i = 0; i < sup.size(); ++i) {
          const bool on = cmask[static_cast<std::size_t>(sup[i])];
          leak(static_cast<Eigen::Index>(i)) = on ? hk(sup[i]) : Complex(0.0);
          any = any || (on && hk(sup[i]) != Complex(0.0));
        }
        if (!any) continue;
        Row re = zero_row();
        Row im = zero_row();
        add_inner(re, im, j, leak, 1.0);
        cone.push_back(re);
        cone.push_back(im);
      }
      for (int j : lay.active) {
        const auto& sup = s.data_support(j);
        const int off = lay.var_offset[static_cast<std::size_t>(j)];
        const auto nj = static_cast<int>(sup.size());
        for (int i = 0; i < nj; ++i) {
          const int ant = sup[static_cast<std::size_t>(i)];
          const double coef = kappa(ant) * std::abs(hk(ant));
          if (!cmask[static_cast<std::size_t>(ant)] || coef == 0.0) continue;
          Row re = zero_row();
          Row im = zero_row();
          re.F(off + i) = coef;
          im.F(off + nj + i) = coef;
          cone.push_back(re);
          cone.push_back(im);
        }
      }
      lay.sinr_cone[static_cast<std::size_t>(k)] = static_cast<int>(cones.size());
      cones.push_back(std::move(cone));
    }

    for (int l = 0; l < nl; ++l) {
      const double q = s.constraint(l).limit;
      std::vector<Row> cone;
      Row r0 = zero_row();
      Row r1 = zero_row();
      r0.f = 0.5;
      r0.F(lay.t_index) = 0.5 * q;
      r1.f = -0.5;
      r1.F(lay.t_index) = 0.5 * q;
      cone.push_back(r0);
      cone.push_back(r1);
      for (int k : lay.active) {
        const Eigen::MatrixXcd& R = factors_[static_cast<std::size_t>(l)][static_cast<std::size_t>(k)];
        const int off = lay.var_offset[static_cast<std::size_t>(k)];
        const auto nk = R.cols();
        for (Eigen::Index r = 0; r < R.rows(); ++r) {
          Row re = zero_row();
          Row im = zero_row();
          for (Eigen::Index i = 0; i < nk; ++i) {
            re.F(off + i) = R(r, i).real();
            re.F(off + nk + i) = -R(r, i).imag();
            im.F(off + i) = R(r, i).imag();
            im.F(off + nk + i) = R(r, i).real();
          }
          cone.push_back(re);
          cone.push_back(im);
        }
      }
      lay.power_cone.push_back(static_cast<int>(cones.size()));
      cones.push_back(std::move(cone));
    }

    ConeProgram prog;
    prog.c = Eigen::VectorXd::Zero(n);
    prog.c(lay.t_index) = 1.0;
    prog.A = A;
    prog.b = b;
    int rows = 0;
    for (const auto& cone : cones) {
      lay.cone_offset.push_back(rows);
      rows += static_cast<int>(cone.size());
      prog.soc_dims.push_back(static_cast<int>(cone.size()));
    }
    prog.G = Eigen::MatrixXd::Zero(rows, n);
    prog.h = Eigen::VectorXd::Zero(rows);
    int r = 0;
    for (const auto& cone : cones) {
      for (const auto& row : cone) {
        prog.h(r) = row.f;
        prog.G.row(r) = -row.F;
        ++r;
      }
    }
    if (layout_out) *layout_out = std::move(lay);
    return prog;
  }

 private:
  Scenario s_;
  std::vector<std::vector<Eigen::MatrixXcd>> factors_;  // [l][k], R^H R = Q_lk on the support of D_k
};

enum class FeasibilityStatus { feasible, infeasible, solver_failure };

inline std::string to_string(FeasibilityStatus s) {
  switch (s) {
    case FeasibilityStatus::feasible: return "feasible";
    case FeasibilityStatus::infeasible: return "infeasible";
    case FeasibilityStatus::solver_failure: return "solver-failure";
  }
  return "solver-failure";
}

struct FeasibilityResult {
  FeasibilityStatus status = FeasibilityStatus::solver_failure;
  double t_star = 0.0;         // minimal common power scaling; feasible iff <= 1
  BeamformingStrategy strategy;  // feasible strategy when status == feasible
  // Lagrange multipliers in the weighting of the closed-form strategy: mu_k sits
  // beside 1/sigma_k^2 and lambda_l beside 1/q_l. Unnormalized; sum(lambda) = 1 and
  // sum(mu) = t_star at an exact optimum.
  Eigen::VectorXd mu;
  Eigen::VectorXd lambda;
  bool duals_valid = false;
  bool inaccurate = false;
  int iterations = 0;
  std::string message;

  bool feasible() const { return status == FeasibilityStatus::feasible; }
};

/// Optimal scalings up to this far above one still count as feasible; the returned
/// strategy is scaled back onto the constraint set.
inline constexpr double kFeasibilitySlack = 1e-8;

/// Decide whether the SINR targets can be met. Users whose channel vanishes on their
/// serving antennas cannot reach a positive target and make the problem infeasible
/// without a solver call.
inline FeasibilityResult solve_feasibility(const FeasibilityModel& model, const Eigen::VectorXd& gammas,
                                           const ConicSolver& solver = *default_solver(),
                                           const SolverSettings& settings = {}) {
  const Scenario& s = model.scenario();
  const int kr = s.num_users();
  FeasibilityResult res;
  res.mu = Eigen::VectorXd::Zero(kr);
  res.lambda = Eigen::VectorXd::Zero(s.num_constraints());
  res.strategy = zero_strategy(s);
  bool any = false;
  for (int k = 0; k < kr; ++k) {
    if (!(gammas(k) > 0.0)) continue;
    any = true;
    if (detail::restrict(s.channel(k), s.data_support(k)).norm() == 0.0) {
      res.status = FeasibilityStatus::infeasible;
      res.t_star = std::numeric_limits<double>::infinity();
      res.message = "user " + std::to_string(k) + " has no channel on its serving antennas";
      return res;
    }
  }
  if (!any) {
    res.status = FeasibilityStatus::feasible;
    return res;
  }

  FeasibilityLayout lay;
  const ConeProgram prog = model.build(gammas, &lay);
  ConicSolution sol = solver.solve(prog, settings);
  res.iterations = sol.iterations;
  res.inaccurate = sol.inaccurate;
  if (sol.status == ConicStatus::primal_infeasible) {
    res.status = FeasibilityStatus::infeasible;
    res.t_star = std::numeric_limits<double>::infinity();
    return res;
  }
  if (sol.status != ConicStatus::optimal) {
    res.status = FeasibilityStatus::solver_failure;
    res.message = "cone solver returned " + to_string(sol.status);
    return res;
  }
  res.t_star = sol.x(lay.t_index);

  // Multipliers. For a second-order cone row block with slack s and dual z,
  // complementarity gives z = zeta J s, and zeta / 2 multiplies the quadratic
  // form s0^2 - ||s1||^2 of the corresponding constraint.
  for (int k : lay.active) {
    const int cone = lay.sinr_cone[static_cast<std::size_t>(k)];
    const int off = lay.cone_offset[static_cast<std::size_t>(cone)];
    const int d = prog.soc_dims[static_cast<std::size_t>(cone)];
    const Eigen::VectorXd sv = sol.s.segment(off, d);
    const Eigen::VectorXd zv = sol.z.segment(off, d);
    const double zjs = zv(0) * sv(0) - zv.tail(d - 1).dot(sv.tail(d - 1));
    const double zeta = zjs / std::max(sv.squaredNorm(), std::numeric_limits<double>::min());
    res.mu(k) = std::max(0.0, s.noise(k) * zeta / 2.0);
  }
  for (int l = 0; l < s.num_constraints(); ++l) {
    const int cone = lay.power_cone[static_cast<std::size_t>(l)];
    const int off = lay.cone_offset[static_cast<std::size_t>(cone)];
    res.lambda(l) = std::max(0.0, s.constraint(l).limit * (sol.z(off) + sol.z(off + 1)) / 2.0);
  }
  res.duals_valid = true;

  if (res.t_star <= 1.0 + kFeasibilitySlack) {
    res.status = FeasibilityStatus::feasible;
    std::vector<Eigen::VectorXcd> v(static_cast<std::size_t>(kr), Eigen::VectorXcd::Zero(s.num_antennas()));
    for (int k : lay.active) {
      const auto& sup = s.data_support(k);
      const auto nk = static_cast<Eigen::Index>(sup.size());
      const int off = lay.var_offset[static_cast<std::size_t>(k)];
      Eigen::VectorXcd vk(nk);
      for (Eigen::Index i = 0; i < nk; ++i) vk(i) = Complex(sol.x(off + i), sol.x(off + nk + i));
      v[static_cast<std::size_t>(k)] = detail::embed(vk, sup, s.num_antennas());
    }
    res.strategy = strategy_from_beamformers(s, v);
    const double c = constraint_usage(s, res.strategy).max;
    if (c > 1.0) res.strategy.powers /= c;
  } else {
    res.status = FeasibilityStatus::infeasible;
  }
  return res;
}

inline FeasibilityResult solve_feasibility(const Scenario& s, const Eigen::VectorXd& gammas) {
  return solve_feasibility(FeasibilityModel(s), gammas);
}

}  // namespace mimo_pareto
