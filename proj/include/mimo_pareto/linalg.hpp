// Copyright 2026 The mimo_pareto Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

namespace mimo_pareto {

using Complex = std::complex<double>;

namespace linalg {

/// Relative singular-value cutoff used by every pseudoinverse in the library.
inline constexpr double kPinvRelTol = 1e-10;

/// Moore-Penrose pseudoinverse of a Hermitian matrix via its eigendecomposition.
/// Eigenvalues with |e| <= rel_tol * max|e| are treated as zero.
inline Eigen::MatrixXcd hermitian_pinv(const Eigen::MatrixXcd& a, double rel_tol = kPinvRelTol) {
  const auto n = a.rows();
  if (n == 0) return a;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(0.5 * (a + a.adjoint()));
  const Eigen::VectorXd& ev = eig.eigenvalues();
  const double cutoff = rel_tol * ev.cwiseAbs().maxCoeff();
  Eigen::VectorXd inv(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    inv(i) = (std::abs(ev(i)) > cutoff && ev(i) != 0.0) ? 1.0 / ev(i) : 0.0;
  }
  const Eigen::MatrixXcd& u = eig.eigenvectors();
  return u * inv.asDiagonal() * u.adjoint();
}

/// Pseudoinverse of a general real matrix (SVD based).
inline Eigen::MatrixXd pinv(const Eigen::MatrixXd& a, double rel_tol = kPinvRelTol) {
  if (a.size() == 0) return a.transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cutoff = rel_tol * sv.maxCoeff();
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff && sv(i) > 0.0) inv(i) = 1.0 / sv(i);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

/// Factor R with R^H R = A for a Hermitian PSD matrix A. Negative eigenvalues are
/// floored at zero and rows belonging to zero eigenvalues are dropped, so R has
/// rank(A) rows.
inline Eigen::MatrixXcd psd_factor(const Eigen::MatrixXcd& a, double rel_tol = 1e-12) {
  const auto n = a.rows();
  if (n == 0) return Eigen::MatrixXcd(0, 0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(0.5 * (a + a.adjoint()));
  const Eigen::VectorXd& ev = eig.eigenvalues();
  const double cutoff = rel_tol * std::max(ev.cwiseAbs().maxCoeff(), 0.0);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (ev(i) > cutoff && ev(i) > 0.0) keep.push_back(i);
  }
  Eigen::MatrixXcd r(static_cast<Eigen::Index>(keep.size()), n);
  for (std::size_t row = 0; row < keep.size(); ++row) {
    const auto i = keep[row];
    r.row(static_cast<Eigen::Index>(row)) = std::sqrt(ev(i)) * eig.eigenvectors().col(i).adjoint();
  }
  return r;
}

/// Smallest eigenvalue that exceeds rel_tol * max|eigenvalue|; 0 when none does.
inline double smallest_positive_eigenvalue(const Eigen::MatrixXcd& a, double rel_tol = 1e-9) {
  if (a.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(0.5 * (a + a.adjoint()),
                                                      Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& ev = eig.eigenvalues();
  const double cutoff = rel_tol * ev.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) > cutoff && ev(i) > 0.0) return ev(i);
  }
  return 0.0;
}

inline double min_eigenvalue(const Eigen::MatrixXcd& a) {
  if (a.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(0.5 * (a + a.adjoint()),
                                                      Eigen::EigenvaluesOnly);
  return eig.eigenvalues()(0);
}

}  // namespace linalg
}  // namespace mimo_pareto
