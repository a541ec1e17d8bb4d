// Copyright 2026 The mimo_pareto Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mimo_pareto/error.hpp"
#include "mimo_pareto/linalg.hpp"
#include "mimo_pareto/metrics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace mimo_pareto {

using UserSet = std::vector<int>;  // zero-based user indices

/// One linear power constraint  sum_k tr(Q_k S_k) <= limit.
struct PowerConstraint {
  std::vector<Eigen::MatrixXcd> weights;  // Q_{lk}, one N x N Hermitian PSD matrix per user
  double limit = 1.0;                     // q_l
  std::string label;
};

/// Canonical constraint sets. All of them are user-independent diagonal projections.
namespace constraints {

inline std::vector<PowerConstraint> total(int num_antennas, int num_users, double limit) {
  PowerConstraint c;
  c.weights.assign(static_cast<std::size_t>(num_users),
                   Eigen::MatrixXcd::Identity(num_antennas, num_antennas));
  c.limit = limit;
  c.label = "total";
  return {c};
}

inline std::vector<PowerConstraint> per_transmitter(const std::vector<int>& antennas_per_tx,
                                                    int num_users, double limit) {
  const int n = std::accumulate(antennas_per_tx.begin(), antennas_per_tx.end(), 0);
  std::vector<PowerConstraint> out;
  int offset = 0;
  for (std::size_t j = 0; j < antennas_per_tx.size(); ++j) {
    Eigen::MatrixXcd q = Eigen::MatrixXcd::Zero(n, n);
    for (int a = 0; a < antennas_per_tx[j]; ++a) q(offset + a, offset + a) = 1.0;
    offset += antennas_per_tx[j];
    PowerConstraint c;
    c.weights.assign(static_cast<std::size_t>(num_users), q);
    c.limit = limit;
    c.label = "per_transmitter[" + std::to_string(j) + "]";
    out.push_back(std::move(c));
  }
  return out;
}

inline std::vector<PowerConstraint> per_antenna(int num_antennas, int num_users, double limit) {
  std::vector<PowerConstraint> out;
  for (int a = 0; a < num_antennas; ++a) {
    Eigen::MatrixXcd q = Eigen::MatrixXcd::Zero(num_antennas, num_antennas);
    q(a, a) = 1.0;
    PowerConstraint c;
    c.weights.assign(static_cast<std::size_t>(num_users), q);
    c.limit = limit;
    c.label = "per_antenna[" + std::to_string(a) + "]";
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace constraints

/// Raw problem description; validated when wrapped into a Scenario.
struct ScenarioData {
  std::vector<int> antennas_per_transmitter;  // N_j
  int num_users = 0;                          // K_r
  std::vector<Eigen::VectorXcd> channels;     // h_k, length N
  std::vector<UserSet> data_clusters;         // D_j per transmitter
  std::vector<UserSet> coord_clusters;        // C_j per transmitter
  std::vector<double> noise_powers;           // sigma_k^2
  std::vector<PowerConstraint> power_constraints;
  Eigen::VectorXd evm;                        // kappa_n per antenna
  std::vector<PerformanceMetric> metrics;     // g_k per user
};

/// Per-user antenna masks for the block-diagonal selection matrices D_k and C_k.
struct SelectionMatrices {
  std::vector<std::vector<bool>> data;          // mask of D_k
  std::vector<std::vector<bool>> coordination;  // mask of C_k
  std::vector<std::vector<int>> data_support;   // antenna indices where D_k is one

  /// Dense diagonal matrix for a mask; for tests and debugging only.
  static Eigen::MatrixXd dense(const std::vector<bool>& mask) {
    Eigen::VectorXd d(static_cast<Eigen::Index>(mask.size()));
    for (std::size_t i = 0; i < mask.size(); ++i) d(static_cast<Eigen::Index>(i)) = mask[i] ? 1.0 : 0.0;
    return d.asDiagonal();
  }
};

/// Rank-one transmit strategy S_k = p_k w_k w_k^H.
struct BeamformingStrategy {
  std::vector<Eigen::VectorXcd> directions;  // w_k, unit norm when p_k > 0
  Eigen::VectorXd powers;                    // p_k >= 0

  int num_users() const { return static_cast<int>(directions.size()); }
};

inline SelectionMatrices build_selection(const ScenarioData& d) {
  const int n = std::accumulate(d.antennas_per_transmitter.begin(), d.antennas_per_transmitter.end(), 0);
  SelectionMatrices sel;
  sel.data.assign(static_cast<std::size_t>(d.num_users), std::vector<bool>(static_cast<std::size_t>(n), false));
  sel.coordination = sel.data;
  sel.data_support.resize(static_cast<std::size_t>(d.num_users));
  int offset = 0;
  for (std::size_t j = 0; j < d.antennas_per_transmitter.size(); ++j) {
    const int nj = d.antennas_per_transmitter[j];
    for (int k : d.data_clusters[j]) {
      for (int a = 0; a < nj; ++a) sel.data[static_cast<std::size_t>(k)][static_cast<std::size_t>(offset + a)] = true;
    }
    for (int k : d.coord_clusters[j]) {
      for (int a = 0; a < nj; ++a) sel.coordination[static_cast<std::size_t>(k)][static_cast<std::size_t>(offset + a)] = true;
    }
    offset += nj;
  }
  for (std::size_t k = 0; k < sel.data.size(); ++k) {
    for (int a = 0; a < n; ++a) {
      if (sel.data[k][static_cast<std::size_t>(a)]) sel.data_support[k].push_back(a);
    }
  }
  return sel;
}

/// Validated, immutable problem instance.
class Scenario {
 public:
  explicit Scenario(ScenarioData data) : d_(std::move(data)) {
    validate();
    sel_ = mimo_pareto::build_selection(d_);
  }

  const ScenarioData& data() const { return d_; }
  const SelectionMatrices& selection() const { return sel_; }

  int num_transmitters() const { return static_cast<int>(d_.antennas_per_transmitter.size()); }
  int num_users() const { return d_.num_users; }
  int num_antennas() const { return n_; }
  int num_constraints() const { return static_cast<int>(d_.power_constraints.size()); }

  const Eigen::VectorXcd& channel(int k) const { return d_.channels[static_cast<std::size_t>(k)]; }
  double noise(int k) const { return d_.noise_powers[static_cast<std::size_t>(k)]; }
  const PowerConstraint& constraint(int l) const { return d_.power_constraints[static_cast<std::size_t>(l)]; }
  const Eigen::MatrixXcd& weight(int l, int k) const {
    return d_.power_constraints[static_cast<std::size_t>(l)].weights[static_cast<std::size_t>(k)];
  }
  const Eigen::VectorXd& evm() const { return d_.evm; }
  bool has_impairments() const { return d_.evm.size() > 0 && d_.evm.maxCoeff() > 0.0; }
  const PerformanceMetric& metric(int k) const { return d_.metrics[static_cast<std::size_t>(k)]; }

  const std::vector<bool>& data_mask(int k) const { return sel_.data[static_cast<std::size_t>(k)]; }
  const std::vector<bool>& coord_mask(int k) const { return sel_.coordination[static_cast<std::size_t>(k)]; }
  const std::vector<int>& data_support(int k) const { return sel_.data_support[static_cast<std::size_t>(k)]; }

  /// Non-fatal findings from validation (e.g. EVM above the typical hardware range).
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  void validate();

  ScenarioData d_;
  SelectionMatrices sel_;
  int n_ = 0;
  std::vector<std::string> warnings_;
};

inline void Scenario::validate() {
  if (d_.antennas_per_transmitter.empty()) throw ValidationError("scenario: need at least one transmitter");
  for (int nj : d_.antennas_per_transmitter) {
    if (nj <= 0) throw ValidationError("scenario: antennas per transmitter must be positive");
  }
  if (d_.num_users <= 0) throw ValidationError("scenario: need at least one user");
  n_ = std::accumulate(d_.antennas_per_transmitter.begin(), d_.antennas_per_transmitter.end(), 0);
  const auto kt = d_.antennas_per_transmitter.size();
  const auto kr = static_cast<std::size_t>(d_.num_users);

  if (d_.channels.size() != kr) throw ValidationError("scenario: one channel vector per user required");
  for (const auto& h : d_.channels) {
    if (h.size() != n_) throw ValidationError("scenario: channel length must equal total antenna count");
    if (!h.allFinite()) throw ValidationError("scenario: channel entries must be finite");
  }
  if (d_.data_clusters.size() != kt || d_.coord_clusters.size() != kt) {
    throw ValidationError("scenario: one data and one coordination cluster per transmitter required");
  }
  for (std::size_t j = 0; j < kt; ++j) {
    std::set<int> coord;
    for (int k : d_.coord_clusters[j]) {
      if (k < 0 || k >= d_.num_users) throw ValidationError("scenario: cluster user index out of range");
      coord.insert(k);
    }
    for (int k : d_.data_clusters[j]) {
      if (k < 0 || k >= d_.num_users) throw ValidationError("scenario: cluster user index out of range");
      if (!coord.count(k)) {
        throw ValidationError("scenario: data cluster of transmitter " + std::to_string(j) +
                              " must be a subset of its coordination cluster");
      }
    }
  }
  if (d_.noise_powers.size() != kr) throw ValidationError("scenario: one noise power per user required");
  for (double s : d_.noise_powers) {
    if (!(s > 0.0) || !std::isfinite(s)) throw ValidationError("scenario: noise powers must be positive");
  }
  if (d_.evm.size() == 0) d_.evm = Eigen::VectorXd::Zero(n_);
  if (d_.evm.size() != n_) throw ValidationError("scenario: one EVM value per antenna required");
  for (Eigen::Index i = 0; i < n_; ++i) {
    if (!(d_.evm(i) >= 0.0) || !std::isfinite(d_.evm(i))) throw ValidationError("scenario: EVM must be nonnegative");
  }
  if (d_.evm.maxCoeff() > 0.15) {
    warnings_.push_back("EVM above 0.15 exceeds the typical hardware range");
  }
  if (d_.metrics.empty()) d_.metrics.assign(kr, PerformanceMetric::rate());
  if (d_.metrics.size() != kr) throw ValidationError("scenario: one metric per user required");

  if (d_.power_constraints.empty()) throw ValidationError("scenario: at least one power constraint required");
  const SelectionMatrices sel = mimo_pareto::build_selection(d_);
  std::vector<Eigen::MatrixXcd> sums(kr, Eigen::MatrixXcd::Zero(n_, n_));
  for (std::size_t l = 0; l < d_.power_constraints.size(); ++l) {
    const auto& c = d_.power_constraints[l];
    if (!(c.limit > 0.0) || !std::isfinite(c.limit)) throw ValidationError("scenario: power limits must be positive");
    if (c.weights.size() != kr) throw ValidationError("scenario: one weight matrix per user and constraint required");
    for (std::size_t k = 0; k < kr; ++k) {
      const auto& q = c.weights[k];
      if (q.rows() != n_ || q.cols() != n_) throw ValidationError("scenario: weight matrices must be N x N");
      const double scale = std::max(q.norm(), 1e-300);
      if ((q - q.adjoint()).norm() > 1e-9 * scale) throw ValidationError("scenario: weight matrices must be Hermitian");
      if (linalg::min_eigenvalue(q) < -1e-9 * scale) throw ValidationError("scenario: weight matrices must be PSD");
      // Off-diagonal coupling outside the served block must vanish.
      const auto& mask = sel.data[k];
      for (int r = 0; r < n_; ++r) {
        for (int s = 0; s < n_; ++s) {
          if (r == s) continue;
          const bool inside = mask[static_cast<std::size_t>(r)] && mask[static_cast<std::size_t>(s)];
          if (!inside && std::abs(q(r, s)) > 1e-9 * scale) {
            throw ValidationError("scenario: Q - D^H Q D must be diagonal for every constraint and user");
          }
        }
      }
      sums[k] += q / c.limit;
    }
  }
  for (std::size_t k = 0; k < kr; ++k) {
    const double scale = sums[k].norm();
    if (!(linalg::min_eigenvalue(sums[k]) > 1e-9 * scale)) {
      throw ValidationError("scenario: the power constraints must bound every direction for user " +
                            std::to_string(k));
    }
  }
}

inline SelectionMatrices build_selection(const Scenario& s) { return s.selection(); }

namespace detail {

inline Eigen::VectorXcd masked(const Eigen::VectorXcd& v, const std::vector<bool>& mask) {
  Eigen::VectorXcd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out(i) = mask[static_cast<std::size_t>(i)] ? v(i) : Complex(0.0);
  return out;
}

inline Eigen::VectorXcd restrict(const Eigen::VectorXcd& v, const std::vector<int>& support) {
  Eigen::VectorXcd out(static_cast<Eigen::Index>(support.size()));
  for (std::size_t i = 0; i < support.size(); ++i) out(static_cast<Eigen::Index>(i)) = v(support[i]);
  return out;
}

inline Eigen::MatrixXcd restrict(const Eigen::MatrixXcd& m, const std::vector<int>& support) {
  const auto n = static_cast<Eigen::Index>(support.size());
  Eigen::MatrixXcd out(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) out(r, c) = m(support[static_cast<std::size_t>(r)], support[static_cast<std::size_t>(c)]);
  }
  return out;
}

inline Eigen::VectorXcd embed(const Eigen::VectorXcd& v, const std::vector<int>& support, int n) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n);
  for (std::size_t i = 0; i < support.size(); ++i) out(support[i]) = v(static_cast<Eigen::Index>(i));
  return out;
}

// Unit vector on the first served antenna, or the zero vector for users nobody serves.
inline Eigen::VectorXcd idle_direction(const Scenario& s, int k) {
  Eigen::VectorXcd w = Eigen::VectorXcd::Zero(s.num_antennas());
  const auto& sup = s.data_support(k);
  if (!sup.empty()) w(sup.front()) = 1.0;
  return w;
}

}  // namespace detail

/// All-zero strategy with valid idle directions.
inline BeamformingStrategy zero_strategy(const Scenario& s) {
  BeamformingStrategy st;
  st.powers = Eigen::VectorXd::Zero(s.num_users());
  for (int k = 0; k < s.num_users(); ++k) st.directions.push_back(detail::idle_direction(s, k));
  return st;
}

/// Build a rank-one strategy from unnormalized beamformers v_k = sqrt(p_k) w_k.
inline BeamformingStrategy strategy_from_beamformers(const Scenario& s, const std::vector<Eigen::VectorXcd>& v) {
  BeamformingStrategy st = zero_strategy(s);
  for (int k = 0; k < s.num_users(); ++k) {
    const Eigen::VectorXcd vk = detail::masked(v[static_cast<std::size_t>(k)], s.data_mask(k));
    const double nrm = vk.norm();
    if (nrm > 0.0) {
      st.directions[static_cast<std::size_t>(k)] = vk / nrm;
      st.powers(k) = nrm * nrm;
    }
  }
  return st;
}

inline void validate_strategy(const Scenario& s, const BeamformingStrategy& st) {
  if (st.num_users() != s.num_users() || st.powers.size() != s.num_users()) {
    throw ValidationError("strategy: one direction and one power per user required");
  }
  for (int k = 0; k < s.num_users(); ++k) {
    const auto& w = st.directions[static_cast<std::size_t>(k)];
    if (w.size() != s.num_antennas()) throw ValidationError("strategy: direction length must equal N");
    if (!(st.powers(k) >= 0.0) || !std::isfinite(st.powers(k))) throw ValidationError("strategy: powers must be nonnegative");
    const auto& mask = s.data_mask(k);
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      if (!mask[static_cast<std::size_t>(i)] && w(i) != Complex(0.0)) {
        throw ValidationError("strategy: beamformer of user " + std::to_string(k) + " leaves its serving antennas");
      }
    }
    if (st.powers(k) > 0.0 && std::abs(w.norm() - 1.0) > 1e-12) {
      throw ValidationError("strategy: active directions must have unit norm");
    }
  }
}

/// Diagonal of the distortion covariance: Xi_nn = kappa_n^2 sum_k p_k |[D_k w_k]_n|^2.
inline Eigen::VectorXd distortion_covariance(const Scenario& s, const BeamformingStrategy& st) {
  Eigen::VectorXd xi = Eigen::VectorXd::Zero(s.num_antennas());
  if (!s.has_impairments()) return xi;
  for (int k = 0; k < s.num_users(); ++k) {
    const double p = st.powers(k);
    if (p == 0.0) continue;
    const auto& w = st.directions[static_cast<std::size_t>(k)];
    for (int n : s.data_support(k)) xi(n) += p * std::norm(w(n));
  }
  return xi.cwiseProduct(s.evm().cwiseAbs2());
}

namespace detail {

// h_k^H C_k D_j w_j
inline Complex coupling(const Scenario& s, int k, int j, const Eigen::VectorXcd& w) {
  const auto& h = s.channel(k);
  const auto& cmask = s.coord_mask(k);
  Complex acc = 0.0;
  for (int n : s.data_support(j)) {
    if (cmask[static_cast<std::size_t>(n)]) acc += std::conj(h(n)) * w(n);
  }
  return acc;
}

inline double sinr_with_xi(const Scenario& s, const BeamformingStrategy& st, int k, const Eigen::VectorXd& xi) {
  const auto& h = s.channel(k);
  const auto& wk = st.directions[static_cast<std::size_t>(k)];
  Complex own = 0.0;
  for (int n : s.data_support(k)) own += std::conj(h(n)) * wk(n);
  const double signal = st.powers(k) * std::norm(own);
  double denom = s.noise(k);
  for (int j = 0; j < s.num_users(); ++j) {
    if (j == k || st.powers(j) == 0.0) continue;
    denom += st.powers(j) * std::norm(coupling(s, k, j, st.directions[static_cast<std::size_t>(j)]));
  }
  const auto& cmask = s.coord_mask(k);
  for (Eigen::Index n = 0; n < xi.size(); ++n) {
    if (cmask[static_cast<std::size_t>(n)] && xi(n) != 0.0) denom += std::norm(h(n)) * xi(n);
  }
  return signal / denom;
}

}  // namespace detail

/// SINR of user k with interference treated as noise and transmitter distortion.
inline double sinr(const Scenario& s, const BeamformingStrategy& st, int k) {
  return detail::sinr_with_xi(s, st, k, distortion_covariance(s, st));
}

inline Eigen::VectorXd sinrs(const Scenario& s, const BeamformingStrategy& st) {
  const Eigen::VectorXd xi = distortion_covariance(s, st);
  Eigen::VectorXd out(s.num_users());
  for (int k = 0; k < s.num_users(); ++k) out(k) = detail::sinr_with_xi(s, st, k, xi);
  return out;
}

inline Eigen::VectorXd performance_from_sinr(const Scenario& s, const Eigen::VectorXd& sinr_values) {
  Eigen::VectorXd out(sinr_values.size());
  for (Eigen::Index k = 0; k < sinr_values.size(); ++k) {
    out(k) = g(s.metric(static_cast<int>(k)), std::max(0.0, sinr_values(k)));
  }
  return out;
}

/// Performance vector (g_1(SINR_1), ..., g_K(SINR_K)).
inline Eigen::VectorXd evaluate_point(const Scenario& s, const BeamformingStrategy& st) {
  return performance_from_sinr(s, sinrs(s, st));
}

struct ConstraintUsage {
  Eigen::VectorXd ratios;  // u_l = sum_k tr(Q_lk S_k) / q_l
  double max = 0.0;        // c = max_l u_l
  bool feasible(double slack = 0.0) const { return max <= 1.0 + slack; }
};

inline ConstraintUsage constraint_usage(const Scenario& s, const BeamformingStrategy& st) {
  ConstraintUsage u;
  u.ratios = Eigen::VectorXd::Zero(s.num_constraints());
  for (int l = 0; l < s.num_constraints(); ++l) {
    double acc = 0.0;
    for (int k = 0; k < s.num_users(); ++k) {
      if (st.powers(k) == 0.0) continue;
      const auto& w = st.directions[static_cast<std::size_t>(k)];
      acc += st.powers(k) * std::real(w.dot(s.weight(l, k) * w));
    }
    u.ratios(l) = std::max(0.0, acc) / s.constraint(l).limit;
  }
  u.max = u.ratios.size() ? u.ratios.maxCoeff() : 0.0;
  return u;
}

}  // namespace mimo_pareto
