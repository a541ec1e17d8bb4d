// Copyright 2026 The mimo_pareto Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mimo_pareto/error.hpp"

#include <Eigen/Dense>

#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace mimo_pareto {

/// Conic program in standard form
///
///   minimize    c^T x
///   subject to  A x = b
///               G x + s = h,   s in K
///
/// with K the product of a nonnegative orthant of dimension `nonneg` followed by
/// second-order cones { (s0, s1) : s0 >= ||s1|| } of the listed dimensions.
struct ConeProgram {
  Eigen::VectorXd c;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::MatrixXd G;
  Eigen::VectorXd h;
  int nonneg = 0;
  std::vector<int> soc_dims;

  int num_variables() const { return static_cast<int>(c.size()); }
  int num_equalities() const { return static_cast<int>(b.size()); }
  int cone_rows() const { return nonneg + std::accumulate(soc_dims.begin(), soc_dims.end(), 0); }
  /// Barrier degree: one per orthant coordinate and one per second-order cone.
  int degree() const { return nonneg + static_cast<int>(soc_dims.size()); }

  void check() const {
    const auto n = c.size();
    if (A.cols() != n && A.rows() > 0) throw ValidationError("cone program: A has the wrong column count");
    if (A.rows() != b.size()) throw ValidationError("cone program: A and b disagree");
    if (G.cols() != n || G.rows() != h.size()) throw ValidationError("cone program: G and h disagree");
    if (cone_rows() != h.size()) throw ValidationError("cone program: cone dimensions do not cover h");
    for (int d : soc_dims) {
      if (d < 1) throw ValidationError("cone program: second-order cones need dimension >= 1");
    }
  }
};

enum class ConicStatus { optimal, primal_infeasible, dual_infeasible, failure };

inline std::string to_string(ConicStatus s) {
  switch (s) {
    case ConicStatus::optimal: return "optimal";
    case ConicStatus::primal_infeasible: return "primal-infeasible";
    case ConicStatus::dual_infeasible: return "dual-infeasible";
    case ConicStatus::failure: return "failure";
  }
  return "failure";
}

/// Solution or certificate. For primal infeasibility (y, z) satisfy
/// A^T y + G^T z ~ 0, z in K, b^T y + h^T z = -1.
struct ConicSolution {
  ConicStatus status = ConicStatus::failure;
  bool inaccurate = false;  // met only the relaxed tolerances
  Eigen::VectorXd x, y, z, s;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  int iterations = 0;
};

struct SolverSettings {
  double feastol = 1e-9;
  double abstol = 1e-9;
  double reltol = 1e-9;
  double feastol_inaccurate = 1e-6;
  double abstol_inaccurate = 1e-6;
  double reltol_inaccurate = 1e-6;
  int max_iterations = 100;
  double step_factor = 0.99;

  /// Settings for a second attempt after a numerical failure.
  SolverSettings tightened() const {
    SolverSettings t = *this;
    t.max_iterations = 2 * max_iterations;
    t.step_factor = 0.95;
    return t;
  }
};

/// Pluggable backend: problem in, solution out. Implementations must be safe to
/// call concurrently on distinct programs.
class ConicSolver {
 public:
  virtual ~ConicSolver() = default;
  virtual ConicSolution solve(const ConeProgram& prog, const SolverSettings& settings) const = 0;
  virtual std::string name() const = 0;
};

/// Plain-text dump of a cone program. Layout:
///
///   conic-program v1
///   variables <n> equalities <p> rows <m>
///   cones nonneg <l> soc <d1> <d2> ...
///   c <n values>
///   b <p values>
///   h <m values>
///   A <nnz>         followed by nnz lines "row col value"
///   G <nnz>         followed by nnz lines "row col value"
///
/// Indices are zero-based, values printed with 17 significant digits.
inline void write_cone_program(std::ostream& os, const ConeProgram& p) {
  const auto old_flags = os.flags();
  const auto old_prec = os.precision();
  os << std::setprecision(17);
  os << "conic-program v1\n";
  os << "variables " << p.num_variables() << " equalities " << p.num_equalities() << " rows " << p.cone_rows() << "\n";
  os << "cones nonneg " << p.nonneg << " soc";
  for (int d : p.soc_dims) os << ' ' << d;
  os << "\n";
  auto vec = [&](const char* tag, const Eigen::VectorXd& v) {
    os << tag;
    for (Eigen::Index i = 0; i < v.size(); ++i) os << ' ' << v(i);
    os << "\n";
  };
  vec("c", p.c);
  vec("b", p.b);
  vec("h", p.h);
  auto mat = [&](const char* tag, const Eigen::MatrixXd& m) {
    std::ostringstream body;
    body << std::setprecision(17);
    long nnz = 0;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        if (m(r, c) != 0.0) {
          body << r << ' ' << c << ' ' << m(r, c) << "\n";
          ++nnz;
        }
      }
    }
    os << tag << ' ' << nnz << "\n" << body.str();
  };
  mat("A", p.A);
  mat("G", p.G);
  os.flags(old_flags);
  os.precision(old_prec);
}

inline std::string cone_program_to_string(const ConeProgram& p) {
  std::ostringstream ss;
  write_cone_program(ss, p);
  return ss.str();
}

}  // namespace mimo_pareto
