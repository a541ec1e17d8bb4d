// Copyright 2026 The mimo_pareto Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mimo_pareto/implicit_boundary.hpp"
#include "mimo_pareto/parallel.hpp"
#include "mimo_pareto/region.hpp"
#include "mimo_pareto/scenario.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace mimo_pareto {

enum class OracleMode { random_directions, angle_grid };

struct OracleConfig {
  std::size_t num_samples = 100000;
  std::uint64_t seed = 1;
  int power_grid = 10;  // power levels {0, 1/G, ..., 1} per user before rescaling
  OracleMode mode = OracleMode::random_directions;
  int angle_steps = 8;  // grid points per angle in angle-grid mode
  unsigned threads = 0;
  std::size_t chunk = 4096;  // candidates per independently seeded chunk
  // Share of num_samples spent on local search around the best strategy found so far
  // on each probe ray; 0 gives plain uniform sampling.
  double refine_fraction = 0.0;
  int refine_rounds = 20;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Rescale so that the tightest constraint holds with equality, then evaluate.
inline bool oracle_row(const Scenario& s, BeamformingStrategy st, RegionRow& row) {
  const double c = constraint_usage(s, st).max;
  if (!(c > 0.0)) return false;
  st.powers /= c;
  row.tag = Provenance::oracle;
  row.sinr = sinrs(s, st);
  row.g = performance_from_sinr(s, row.sinr);
  row.c = c;
  row.usage = constraint_usage(s, st).ratios;
  return true;
}

inline std::vector<Eigen::VectorXcd> angle_grid_directions(int n, int steps) {
  // Unit vectors up to a common phase: magnitudes from nested angles in [0, pi/2],
  // relative phases of the trailing entries in [0, 2 pi).
  std::vector<Eigen::VectorXcd> out;
  const double half_pi = std::numbers::pi / 2.0;
  auto theta = [&](int i) { return steps == 1 ? 0.0 : half_pi * i / (steps - 1); };
  auto phi = [&](int i) { return 2.0 * std::numbers::pi * i / steps; };
  if (n == 1) {
    out.push_back(Eigen::VectorXcd::Ones(1));
  } else if (n == 2) {
    for (int a = 0; a < steps; ++a) {
      for (int p = 0; p < steps; ++p) {
        Eigen::VectorXcd w(2);
        w << std::cos(theta(a)), std::sin(theta(a)) * std::polar(1.0, phi(p));
        out.push_back(w);
      }
    }
  } else if (n == 3) {
    for (int a = 0; a < steps; ++a) {
      for (int b = 0; b < steps; ++b) {
        for (int p = 0; p < steps; ++p) {
          for (int q = 0; q < steps; ++q) {
            Eigen::VectorXcd w(3);
            w << std::cos(theta(a)), std::sin(theta(a)) * std::cos(theta(b)) * std::polar(1.0, phi(p)),
                std::sin(theta(a)) * std::sin(theta(b)) * std::polar(1.0, phi(q));
            out.push_back(w);
          }
        }
      }
    }
  } else {
    throw ValidationError("oracle: angle-grid mode supports at most three serving antennas per user");
  }
  return out;
}

}  // namespace detail

/// Single-user maximum ratio transmission candidates, one per user with a channel.
inline std::vector<BeamformingStrategy> axis_candidates(const Scenario& s) {
  std::vector<BeamformingStrategy> out;
  for (int k = 0; k < s.num_users(); ++k) {
    const auto& sup = s.data_support(k);
    const Eigen::VectorXcd b = detail::restrict(s.channel(k), sup);
    if (b.norm() == 0.0) continue;
    BeamformingStrategy st = zero_strategy(s);
    st.directions[static_cast<std::size_t>(k)] = detail::embed(b / b.norm(), sup, s.num_antennas());
    st.powers(k) = 1.0;
    out.push_back(std::move(st));
  }
  return out;
}

/// Brute-force sample of the performance region from random rank-one strategies,
/// each rescaled onto the boundary of the feasible set. Axis candidates come first.
/// Results depend only on the seed, not on the thread count.
inline RegionSample random_cloud(const Scenario& s, const OracleConfig& cfg) {
  if (cfg.num_samples < 1) throw ValidationError("oracle: num_samples must be at least 1");
  if (cfg.power_grid < 1) throw ValidationError("oracle: power_grid must be at least 1");
  if (cfg.chunk < 1) throw ValidationError("oracle: chunk must be at least 1");
  const int kr = s.num_users();
  RegionSample out{fingerprint(s), kr, s.num_constraints(), {}};
  for (const auto& st : axis_candidates(s)) {
    RegionRow row;
    if (detail::oracle_row(s, st, row)) out.rows.push_back(std::move(row));
  }

  if (cfg.mode == OracleMode::angle_grid) {
    std::vector<std::vector<Eigen::VectorXcd>> grids;
    std::size_t combos = 1;
    for (int k = 0; k < kr; ++k) {
      grids.push_back(detail::angle_grid_directions(static_cast<int>(s.data_support(k).size()), cfg.angle_steps));
      combos *= grids.back().size() * static_cast<std::size_t>(cfg.power_grid + 1);
    }
    if (combos > cfg.num_samples) {
      throw ValidationError("oracle: angle grid has " + std::to_string(combos) + " candidates, above num_samples");
    }
    std::vector<RegionRow> rows(combos);
    std::vector<char> used(combos, 0);
    parallel_for(combos, cfg.threads, [&](std::size_t idx) {
      BeamformingStrategy st = zero_strategy(s);
      std::size_t rest = idx;
      for (int k = 0; k < kr; ++k) {
        const auto& g = grids[static_cast<std::size_t>(k)];
        const std::size_t levels = static_cast<std::size_t>(cfg.power_grid + 1);
        const std::size_t dir = rest % g.size();
        rest /= g.size();
        const std::size_t lvl = rest % levels;
        rest /= levels;
        st.directions[static_cast<std::size_t>(k)] = detail::embed(g[dir], s.data_support(k), s.num_antennas());
        st.powers(k) = static_cast<double>(lvl) / cfg.power_grid;
      }
      used[idx] = detail::oracle_row(s, st, rows[idx]) ? 1 : 0;
    });
    for (std::size_t i = 0; i < combos; ++i) {
      if (used[i]) out.rows.push_back(std::move(rows[i]));
    }
    return out;
  }

  const std::size_t n_refine =
      static_cast<std::size_t>(std::clamp(cfg.refine_fraction, 0.0, 1.0) * static_cast<double>(cfg.num_samples));
  const std::size_t n = cfg.num_samples - n_refine;
  const std::size_t chunks = (n + cfg.chunk - 1) / cfg.chunk;
  std::vector<RegionRow> rows(n);
  std::vector<BeamformingStrategy> strategies(n);
  std::vector<char> used(n, 0);
  parallel_for(chunks, cfg.threads, [&](std::size_t c) {
    std::mt19937_64 rng(detail::splitmix64(cfg.seed ^ detail::splitmix64(c)));
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    std::uniform_int_distribution<int> level(0, cfg.power_grid);
    std::uniform_int_distribution<int> pick(0, kr - 1);
    const std::size_t end = std::min(n, (c + 1) * cfg.chunk);
    for (std::size_t i = c * cfg.chunk; i < end; ++i) {
      BeamformingStrategy st = zero_strategy(s);
      for (int k = 0; k < kr; ++k) {
        const auto& sup = s.data_support(k);
        Eigen::VectorXcd w(static_cast<Eigen::Index>(sup.size()));
        for (Eigen::Index a = 0; a < w.size(); ++a) {
          const double re = normal(rng);
          const double im = normal(rng);
          w(a) = Complex(re, im);
        }
        if (w.norm() > 0.0) st.directions[static_cast<std::size_t>(k)] = detail::embed(w / w.norm(), sup, s.num_antennas());
        st.powers(k) = static_cast<double>(level(rng)) / cfg.power_grid;
      }
      if (st.powers.sum() == 0.0) st.powers(pick(rng)) = 1.0;
      used[i] = detail::oracle_row(s, st, rows[i]) ? 1 : 0;
      strategies[i] = std::move(st);
    }
  });
  for (std::size_t i = 0; i < n; ++i) {
    if (used[i]) out.rows.push_back(std::move(rows[i]));
  }
  if (n_refine == 0) return out;

  // Local search: keep the best strategy on every probe ray and spend each round's
  // budget on random perturbations of those strategies with a shrinking step.
  const std::vector<FairnessProfile> probes =
      kr == 1 ? uniform_profiles(1, 1) : uniform_profiles(kr, kr == 2 ? 101 : 11);
  std::vector<double> best_value(probes.size(), -1.0);
  std::vector<BeamformingStrategy> best(probes.size(), zero_strategy(s));
  auto absorb = [&](const RegionRow& row, const BeamformingStrategy& st) {
    for (std::size_t j = 0; j < probes.size(); ++j) {
      const double v = ray_value(row.g, probes[j].alpha);
      if (v > best_value[j]) {
        best_value[j] = v;
        best[j] = st;
      }
    }
  };
  {
    const auto axes = axis_candidates(s);
    std::size_t a = 0;
    for (const auto& st : axes) absorb(out.rows[a++], st);
    std::size_t r = axes.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (used[i]) absorb(out.rows[r++], strategies[i]);
    }
  }
  const int rounds = std::max(1, cfg.refine_rounds);
  std::size_t done = 0;
  for (int round = 0; round < rounds; ++round) {
    const std::size_t budget = (n_refine * static_cast<std::size_t>(round + 1)) / static_cast<std::size_t>(rounds) - done;
    done += budget;
    const double step = 0.5 * std::pow(0.01 / 0.5, static_cast<double>(round) / std::max(1, rounds - 1));
    std::vector<RegionRow> rrows(budget);
    std::vector<BeamformingStrategy> rstrat(budget);
    std::vector<char> rused(budget, 0);
    const std::size_t rchunks = (budget + cfg.chunk - 1) / cfg.chunk;
    parallel_for(rchunks, cfg.threads, [&](std::size_t c) {
      std::mt19937_64 rng(detail::splitmix64(cfg.seed ^ detail::splitmix64(0x5eedULL + static_cast<std::uint64_t>(round) * 1000003ULL + c)));
      std::normal_distribution<double> normal(0.0, 1.0);
      const std::size_t end = std::min(budget, (c + 1) * cfg.chunk);
      for (std::size_t i = c * cfg.chunk; i < end; ++i) {
        BeamformingStrategy st = best[i % probes.size()];
        for (int k = 0; k < kr; ++k) {
          const auto& sup = s.data_support(k);
          if (sup.empty()) continue;
          Eigen::VectorXcd w = detail::restrict(st.directions[static_cast<std::size_t>(k)], sup);
          for (Eigen::Index a = 0; a < w.size(); ++a) {
            const double re = normal(rng);
            const double im = normal(rng);
            w(a) += step * std::sqrt(0.5) * Complex(re, im);
          }
          if (w.norm() > 0.0) st.directions[static_cast<std::size_t>(k)] = detail::embed(w / w.norm(), sup, s.num_antennas());
          const double base = std::max(st.powers(k), 1e-3 * st.powers.maxCoeff());
          st.powers(k) = base * std::exp(step * normal(rng));
        }
        rused[i] = detail::oracle_row(s, st, rrows[i]) ? 1 : 0;
        rstrat[i] = std::move(st);
      }
    });
    for (std::size_t i = 0; i < budget; ++i) {
      if (!rused[i]) continue;
      absorb(rrows[i], rstrat[i]);
      out.rows.push_back(std::move(rrows[i]));
    }
  }
  return out;
}

struct DominanceReport {
  double worst_excess = 0.0;  // largest amount (g units) by which a cloud point passes the boundary along a ray
  std::size_t worst_profile = 0;
  std::size_t violations = 0;  // rays passed by more than tol
  double front_gap = 0.0;      // largest relative shortfall of the cloud front below the boundary
  double mean_front_gap = 0.0;
  bool passed = true;
};

/// Ray-wise comparison of a sampled cloud against a traced boundary.
inline DominanceReport check_dominance(const RegionSample& cloud, const RegionSample& boundary, double tol) {
  const GapReport gap = boundary_gap(cloud, boundary);
  DominanceReport rep;
  rep.worst_excess = std::max(0.0, gap.max_excess);
  rep.worst_profile = gap.worst_excess_index;
  for (double e : gap.excess) {
    if (e > tol) ++rep.violations;
  }
  rep.front_gap = gap.max_gap;
  rep.mean_front_gap = gap.mean_gap;
  rep.passed = rep.violations == 0;
  return rep;
}

}  // namespace mimo_pareto
