// Copyright 2026 The mimo_pareto Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mimo_pareto/cone_program.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <vector>

namespace mimo_pareto {

namespace ipm {

/// Block layout of the cone K.
struct ConeLayout {
  int nonneg = 0;
  std::vector<int> soc;
  std::vector<int> soc_offset;
  int rows = 0;

  explicit ConeLayout(const ConeProgram& p) : nonneg(p.nonneg), soc(p.soc_dims) {
    int off = nonneg;
    for (int d : soc) {
      soc_offset.push_back(off);
      off += d;
    }
    rows = off;
  }
  int degree() const { return nonneg + static_cast<int>(soc.size()); }
};

inline Eigen::VectorXd identity(const ConeLayout& k) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(k.rows);
  e.head(k.nonneg).setOnes();
  for (int off : k.soc_offset) e(off) = 1.0;
  return e;
}

/// Jordan product u o v.
inline Eigen::VectorXd jordan_product(const ConeLayout& k, const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  Eigen::VectorXd out(k.rows);
  out.head(k.nonneg) = u.head(k.nonneg).cwiseProduct(v.head(k.nonneg));
  for (std::size_t i = 0; i < k.soc.size(); ++i) {
    const int off = k.soc_offset[i];
    const int d = k.soc[i];
    out(off) = u.segment(off, d).dot(v.segment(off, d));
    if (d > 1) out.segment(off + 1, d - 1) = u(off) * v.segment(off + 1, d - 1) + v(off) * u.segment(off + 1, d - 1);
  }
  return out;
}

/// x with lambda o x = d.
inline Eigen::VectorXd jordan_solve(const ConeLayout& k, const Eigen::VectorXd& lambda, const Eigen::VectorXd& d) {
  Eigen::VectorXd out(k.rows);
  out.head(k.nonneg) = d.head(k.nonneg).cwiseQuotient(lambda.head(k.nonneg));
  for (std::size_t i = 0; i < k.soc.size(); ++i) {
    const int off = k.soc_offset[i];
    const int n = k.soc[i] - 1;
    const double l0 = lambda(off);
    const auto l1 = lambda.segment(off + 1, n);
    const auto d1 = d.segment(off + 1, n);
    const double det = l0 * l0 - l1.squaredNorm();
    const double x0 = (l0 * d(off) - l1.dot(d1)) / det;
    out(off) = x0;
    if (n > 0) out.segment(off + 1, n) = (d1 - x0 * l1) / l0;
  }
  return out;
}

/// Largest alpha with x + alpha dx in K (infinity when unbounded).
inline double max_step(const ConeLayout& k, const Eigen::VectorXd& x, const Eigen::VectorXd& dx) {
  double alpha = std::numeric_limits<double>::infinity();
  for (int i = 0; i < k.nonneg; ++i) {
    if (dx(i) < 0.0) alpha = std::min(alpha, -x(i) / dx(i));
  }
  for (std::size_t i = 0; i < k.soc.size(); ++i) {
    const int off = k.soc_offset[i];
    const int n = k.soc[i] - 1;
    const double x0 = x(off);
    const double d0 = dx(off);
    if (n == 0) {
      if (d0 < 0.0) alpha = std::min(alpha, -x0 / d0);
      continue;
    }
    const auto x1 = x.segment(off + 1, n);
    const auto d1 = dx.segment(off + 1, n);
    // f(a) = a^2 qa + 2 a qb + qc must stay nonnegative, with x0 + a d0 >= 0.
    const double qa = d0 * d0 - d1.squaredNorm();
    const double qb = x0 * d0 - x1.dot(d1);
    const double qc = std::max(0.0, x0 * x0 - x1.squaredNorm());
    double root = std::numeric_limits<double>::infinity();
    if (qa == 0.0) {
      if (qb < 0.0) root = -qc / (2.0 * qb);
    } else {
      const double disc = qb * qb - qa * qc;
      if (disc >= 0.0) {
        const double sq = std::sqrt(disc);
        const double q = -(qb + std::copysign(sq, qb));
        for (double r : {q / qa, q != 0.0 ? qc / q : std::numeric_limits<double>::infinity()}) {
          if (r > 0.0) root = std::min(root, r);
        }
      }
    }
    if (d0 < 0.0) root = std::min(root, -x0 / d0);
    alpha = std::min(alpha, root);
  }
  return alpha;
}

/// Nesterov-Todd scaling: W z = W^{-1} s = lambda. W is symmetric and block diagonal.
struct NtScaling {
  Eigen::VectorXd lp_w;                 // diagonal part for the orthant
  std::vector<Eigen::MatrixXd> soc_w;   // one dense block per second-order cone
  std::vector<Eigen::MatrixXd> soc_winv;
  Eigen::VectorXd lambda;
  bool ok = true;
};

inline NtScaling nt_scaling(const ConeLayout& k, const Eigen::VectorXd& s, const Eigen::VectorXd& z) {
  NtScaling w;
  w.lp_w = (s.head(k.nonneg).array() / z.head(k.nonneg).array()).sqrt().matrix();
  w.lambda = Eigen::VectorXd(k.rows);
  w.lambda.head(k.nonneg) = (s.head(k.nonneg).array() * z.head(k.nonneg).array()).sqrt().matrix();
  for (std::size_t i = 0; i < k.soc.size(); ++i) {
    const int off = k.soc_offset[i];
    const int d = k.soc[i];
    const int n = d - 1;
    const Eigen::VectorXd sv = s.segment(off, d);
    const Eigen::VectorXd zv = z.segment(off, d);
    const double sjs = sv(0) * sv(0) - sv.tail(n).squaredNorm();
    const double zjz = zv(0) * zv(0) - zv.tail(n).squaredNorm();
    if (!(sjs > 0.0) || !(zjz > 0.0)) {
      w.ok = false;
      return w;
    }
    const double sn = std::sqrt(sjs);
    const double zn = std::sqrt(zjz);
    const Eigen::VectorXd sb = sv / sn;
    const Eigen::VectorXd zb = zv / zn;
    const double gamma = std::sqrt(std::max(0.0, (1.0 + sb.dot(zb)) / 2.0));
    Eigen::VectorXd wb(d);
    wb(0) = (sb(0) + zb(0)) / (2.0 * gamma);
    wb.tail(n) = (sb.tail(n) - zb.tail(n)) / (2.0 * gamma);
    const double beta = std::sqrt(sn / zn);
    Eigen::MatrixXd wm(d, d);
    Eigen::MatrixXd wi(d, d);
    const Eigen::VectorXd w1 = wb.tail(n);
    const Eigen::MatrixXd inner = Eigen::MatrixXd::Identity(n, n) + w1 * w1.transpose() / (1.0 + wb(0));
    wm(0, 0) = wb(0);
    wm.block(0, 1, 1, n) = w1.transpose();
    wm.block(1, 0, n, 1) = w1;
    wm.block(1, 1, n, n) = inner;
    wi = wm;
    wi.block(0, 1, 1, n) *= -1.0;
    wi.block(1, 0, n, 1) *= -1.0;
    wm *= beta;
    wi /= beta;
    w.lambda.segment(off, d) = wm * zv;
    w.soc_w.push_back(std::move(wm));
    w.soc_winv.push_back(std::move(wi));
  }
  return w;
}

inline Eigen::VectorXd apply_w(const ConeLayout& k, const NtScaling& w, const Eigen::VectorXd& v, bool inverse) {
  Eigen::VectorXd out(k.rows);
  if (inverse) {
    out.head(k.nonneg) = v.head(k.nonneg).cwiseQuotient(w.lp_w);
  } else {
    out.head(k.nonneg) = v.head(k.nonneg).cwiseProduct(w.lp_w);
  }
  for (std::size_t i = 0; i < k.soc.size(); ++i) {
    const int off = k.soc_offset[i];
    const int d = k.soc[i];
    out.segment(off, d) = (inverse ? w.soc_winv[i] : w.soc_w[i]) * v.segment(off, d);
  }
  return out;
}

}  // namespace ipm

/// Dense primal-dual interior-point method on the homogeneous self-dual embedding
/// with Nesterov-Todd scaling and Mehrotra predictor-corrector steps. Meant for the
/// small programs of this library (a few hundred rows at most).
class InteriorPointSolver final : public ConicSolver {
 public:
  std::string name() const override { return "dense-hsde-ipm"; }

  ConicSolution solve(const ConeProgram& prog, const SolverSettings& set) const override {
    prog.check();
    using Eigen::VectorXd;
    const ipm::ConeLayout cones(prog);
    const int n = prog.num_variables();
    const int p = prog.num_equalities();
    const int m = cones.rows;
    const Eigen::MatrixXd A = p > 0 ? prog.A : Eigen::MatrixXd(0, n);
    const VectorXd& c = prog.c;
    const VectorXd& b = prog.b;
    const VectorXd& h = prog.h;
    const Eigen::MatrixXd& G = prog.G;
    const double deg = cones.degree();
    const double bnorm = std::max({1.0, b.size() ? b.norm() : 0.0, h.norm()});
    const double cnorm = std::max(1.0, c.norm());
    const VectorXd e = ipm::identity(cones);

    VectorXd x = VectorXd::Zero(n);
    VectorXd y = VectorXd::Zero(p);
    VectorXd s = e;
    VectorXd z = e;
    double tau = 1.0;
    double kappa = 1.0;

    ConicSolution sol;
    const int dim = n + p + m;
    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(dim, dim);
    kkt.block(0, n, n, p) = A.transpose();
    kkt.block(0, n + p, n, m) = G.transpose();
    kkt.block(n, 0, p, n) = A;
    kkt.block(n + p, 0, m, n) = G;
    constexpr double kReg = 1e-12;

    struct Metrics {
      double pres, dres, pcost, dcost, gap, relgap;
      double infeas_p, infeas_d;
      bool pinf_sign, dinf_sign;
    };
    auto measure = [&](const VectorXd& rx, const VectorXd& ry, const VectorXd& rz) {
      Metrics mt{};
      const double ry_n = ry.size() ? ry.norm() : 0.0;
      mt.pres = std::max(ry_n, rz.norm()) / tau / bnorm;
      mt.dres = rx.norm() / tau / cnorm;
      mt.pcost = c.dot(x) / tau;
      mt.dcost = -(b.dot(y) + h.dot(z)) / tau;
      mt.gap = s.dot(z) / (tau * tau);
      mt.relgap = std::numeric_limits<double>::infinity();
      if (mt.pcost < 0.0) mt.relgap = mt.gap / -mt.pcost;
      if (mt.dcost > 0.0) mt.relgap = mt.gap / mt.dcost;
      const double byhz = b.dot(y) + h.dot(z);
      mt.pinf_sign = byhz < 0.0;
      mt.infeas_p = mt.pinf_sign ? (A.transpose() * y + G.transpose() * z).norm() / -byhz : 1e300;
      const double cx = c.dot(x);
      mt.dinf_sign = cx < 0.0;
      mt.infeas_d = mt.dinf_sign ? std::max((A * x).norm(), (G * x + s).norm()) / -cx : 1e300;
      return mt;
    };

    auto finish = [&](ConicStatus status, bool inaccurate, const Metrics& mt) {
      sol.status = status;
      sol.inaccurate = inaccurate;
      sol.primal_residual = mt.pres;
      sol.dual_residual = mt.dres;
      sol.gap = mt.gap;
      if (status == ConicStatus::optimal) {
        sol.x = x / tau;
        sol.y = y / tau;
        sol.z = z / tau;
        sol.s = s / tau;
        sol.primal_objective = mt.pcost;
        sol.dual_objective = mt.dcost;
      } else if (status == ConicStatus::primal_infeasible) {
        const double scale = -(b.dot(y) + h.dot(z));
        sol.y = y / scale;
        sol.z = z / scale;
        sol.x = VectorXd::Zero(n);
        sol.s = VectorXd::Zero(m);
      } else if (status == ConicStatus::dual_infeasible) {
        const double scale = -c.dot(x);
        sol.x = x / scale;
        sol.s = s / scale;
        sol.y = VectorXd::Zero(p);
        sol.z = VectorXd::Zero(m);
      } else {
        sol.x = x / tau;
        sol.y = y / tau;
        sol.z = z / tau;
        sol.s = s / tau;
      }
      return sol;
    };

    auto classify = [&](const Metrics& mt, double feastol, double abstol, double reltol, ConicStatus& out) {
      if (mt.pres < feastol && mt.dres < feastol && (mt.gap < abstol || mt.relgap < reltol)) {
        out = ConicStatus::optimal;
        return true;
      }
      if (mt.pinf_sign && mt.infeas_p < feastol) {
        out = ConicStatus::primal_infeasible;
        return true;
      }
      if (mt.dinf_sign && mt.infeas_d < feastol) {
        out = ConicStatus::dual_infeasible;
        return true;
      }
      return false;
    };

    Metrics mt{};
    for (int it = 0;; ++it) {
      const VectorXd rx = A.transpose() * y + G.transpose() * z + c * tau;
      const VectorXd ry = A * x - b * tau;
      const VectorXd rz = s + G * x - h * tau;
      const double rt = kappa + c.dot(x) + b.dot(y) + h.dot(z);
      mt = measure(rx, ry, rz);
      sol.iterations = it;
      ConicStatus st{};
      if (classify(mt, set.feastol, set.abstol, set.reltol, st)) return finish(st, false, mt);
      if (it >= set.max_iterations) break;

      const ipm::NtScaling w = ipm::nt_scaling(cones, s, z);
      if (!w.ok) break;
      const double mu = (s.dot(z) + tau * kappa) / (deg + 1.0);

      // -W^T W block.
      kkt.block(n + p, n + p, m, m).setZero();
      for (int i = 0; i < cones.nonneg; ++i) kkt(n + p + i, n + p + i) = -w.lp_w(i) * w.lp_w(i);
      for (std::size_t i = 0; i < cones.soc.size(); ++i) {
        const int off = cones.soc_offset[i];
        const int d = cones.soc[i];
        kkt.block(n + p + off, n + p + off, d, d) = -(w.soc_w[i] * w.soc_w[i]);
      }
      Eigen::MatrixXd reg = kkt;
      reg.diagonal().head(n).array() += kReg;
      reg.diagonal().segment(n, p).array() -= kReg;
      reg.diagonal().tail(m).array() -= kReg;
      const Eigen::PartialPivLU<Eigen::MatrixXd> lu(reg);
      auto kkt_solve = [&](const VectorXd& rhs) {
        VectorXd sol_v = lu.solve(rhs);
        for (int r = 0; r < 3; ++r) sol_v += lu.solve(rhs - kkt * sol_v);
        return sol_v;
      };

      VectorXd q(dim);
      q << c, b, h;
      VectorXd rhs1(dim);
      rhs1 << -c, b, h;
      const VectorXd u1 = kkt_solve(rhs1);
      const double denom_base = q.dot(u1) - kappa / tau;

      struct Step {
        VectorXd dx, dy, dz, ds;
        double dtau, dkappa;
      };
      auto direction = [&](double sigma, const VectorXd& d_s, double d_k) {
        const VectorXd ldiv = ipm::jordan_solve(cones, w.lambda, d_s);
        const VectorXd wl = ipm::apply_w(cones, w, ldiv, false);
        VectorXd rhs2(dim);
        rhs2 << -(1.0 - sigma) * rx, -(1.0 - sigma) * ry, -(1.0 - sigma) * rz - wl;
        const VectorXd u2 = kkt_solve(rhs2);
        Step dir;
        dir.dtau = (-(1.0 - sigma) * rt - d_k / tau - q.dot(u2)) / denom_base;
        const VectorXd u = u2 + dir.dtau * u1;
        dir.dx = u.head(n);
        dir.dy = u.segment(n, p);
        dir.dz = u.tail(m);
        dir.ds = ipm::apply_w(cones, w, ldiv - ipm::apply_w(cones, w, dir.dz, false), false);
        dir.dkappa = (d_k - kappa * dir.dtau) / tau;
        return dir;
      };
      auto step_length = [&](const Step& d) {
        double a = std::min(ipm::max_step(cones, s, d.ds), ipm::max_step(cones, z, d.dz));
        if (d.dtau < 0.0) a = std::min(a, -tau / d.dtau);
        if (d.dkappa < 0.0) a = std::min(a, -kappa / d.dkappa);
        return a;
      };

      const VectorXd ll = ipm::jordan_product(cones, w.lambda, w.lambda);
      const Step aff = direction(0.0, -ll, -tau * kappa);
      const double alpha_aff = std::min(1.0, step_length(aff));
      const double sigma = std::clamp(std::pow(1.0 - alpha_aff, 3.0), 0.0, 1.0);

      const VectorXd corr = ipm::jordan_product(cones, ipm::apply_w(cones, w, aff.ds, true),
                                                ipm::apply_w(cones, w, aff.dz, false));
      const Step cmb = direction(sigma, -ll - corr + sigma * mu * e, -tau * kappa - aff.dtau * aff.dkappa + sigma * mu);
      const double alpha = std::min(1.0, set.step_factor * step_length(cmb));
      if (!(alpha > 1e-12) || !std::isfinite(alpha)) break;

      x += alpha * cmb.dx;
      y += alpha * cmb.dy;
      z += alpha * cmb.dz;
      s += alpha * cmb.ds;
      tau += alpha * cmb.dtau;
      kappa += alpha * cmb.dkappa;
      if (!x.allFinite() || !z.allFinite() || !s.allFinite() || !std::isfinite(tau)) break;
    }

    ConicStatus st{};
    if (classify(mt, set.feastol_inaccurate, set.abstol_inaccurate, set.reltol_inaccurate, st)) {
      return finish(st, true, mt);
    }
    return finish(ConicStatus::failure, false, mt);
  }
};

inline std::shared_ptr<const ConicSolver> default_solver() {
  static const auto solver = std::make_shared<const InteriorPointSolver>();
  return solver;
}

}  // namespace mimo_pareto
