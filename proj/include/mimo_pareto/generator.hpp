// Copyright 2026 The mimo_pareto Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mimo_pareto/scenario.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

namespace mimo_pareto {

enum class ScenarioKind { miso_ic, network_mimo };

inline ScenarioKind parse_scenario_kind(const std::string& s) {
  if (s == "miso-ic") return ScenarioKind::miso_ic;
  if (s == "network-mimo") return ScenarioKind::network_mimo;
  throw ValidationError("unknown scenario kind '" + s + "' (expected miso-ic or network-mimo)");
}

inline std::string to_string(ScenarioKind k) { return k == ScenarioKind::miso_ic ? "miso-ic" : "network-mimo"; }

struct ScenarioSizes {
  int transmitters = 1;             // K_t; for miso-ic also the number of users
  int antennas_per_transmitter = 2; // N_j
  int users = 2;                    // K_r; ignored for miso-ic
};

/// Random Rayleigh-fading instance of one of the two reference setups.
///
/// Channels are i.i.d. CN(0,1). Noise powers are one and the power limits are
/// chosen so that a single user receiving full-power maximum ratio transmission
/// sees an average SNR of 10^(snr_db/10):
///   miso-ic       per-transmitter limit q, user k served by transmitter k only,
///                 average MRT SNR = q N_j            -> q = snr / N_j
///   network-mimo  per-antenna limit q, every transmitter serves every user,
///                 average MRT SNR = (N q) N           -> q = snr / N^2
inline Scenario generate_scenario(ScenarioKind kind, const ScenarioSizes& sizes, double snr_db, double evm,
                                  std::uint64_t seed) {
  if (sizes.transmitters <= 0 || sizes.antennas_per_transmitter <= 0) {
    throw ValidationError("generate_scenario: transmitters and antennas must be positive");
  }
  if (kind == ScenarioKind::network_mimo && sizes.users <= 0) {
    throw ValidationError("generate_scenario: users must be positive");
  }
  if (!(evm >= 0.0)) throw ValidationError("generate_scenario: EVM must be nonnegative");
  if (!std::isfinite(snr_db)) throw ValidationError("generate_scenario: SNR must be finite");

  ScenarioData d;
  d.antennas_per_transmitter.assign(static_cast<std::size_t>(sizes.transmitters), sizes.antennas_per_transmitter);
  const int n = sizes.transmitters * sizes.antennas_per_transmitter;
  const int kr = kind == ScenarioKind::miso_ic ? sizes.transmitters : sizes.users;
  d.num_users = kr;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  for (int k = 0; k < kr; ++k) {
    Eigen::VectorXcd h(n);
    for (int i = 0; i < n; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      h(i) = Complex(re, im);
    }
    d.channels.push_back(h);
  }

  UserSet everyone(static_cast<std::size_t>(kr));
  std::iota(everyone.begin(), everyone.end(), 0);
  const double snr = std::pow(10.0, snr_db / 10.0);
  if (kind == ScenarioKind::miso_ic) {
    for (int j = 0; j < sizes.transmitters; ++j) {
      d.data_clusters.push_back({j});
      d.coord_clusters.push_back(everyone);
    }
    d.power_constraints = constraints::per_transmitter(d.antennas_per_transmitter, kr,
                                                       snr / sizes.antennas_per_transmitter);
  } else {
    for (int j = 0; j < sizes.transmitters; ++j) {
      d.data_clusters.push_back(everyone);
      d.coord_clusters.push_back(everyone);
    }
    d.power_constraints = constraints::per_antenna(n, kr, snr / (static_cast<double>(n) * n));
  }
  d.noise_powers.assign(static_cast<std::size_t>(kr), 1.0);
  d.evm = Eigen::VectorXd::Constant(n, evm);
  d.metrics.assign(static_cast<std::size_t>(kr), PerformanceMetric::rate());
  return Scenario(std::move(d));
}

/// Same scenario with a uniform EVM value on every antenna.
inline Scenario with_uniform_evm(const Scenario& s, double evm) {
  ScenarioData d = s.data();
  d.evm = Eigen::VectorXd::Constant(s.num_antennas(), evm);
  return Scenario(std::move(d));
}

inline Scenario with_metric(const Scenario& s, const PerformanceMetric& m) {
  ScenarioData d = s.data();
  d.metrics.assign(static_cast<std::size_t>(s.num_users()), m);
  return Scenario(std::move(d));
}

}  // namespace mimo_pareto
