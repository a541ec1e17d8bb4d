// Copyright 2026 The mimo_pareto Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mimo_pareto/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace mimo_pareto {

enum class MetricKind { rate, mse, ser4qam, table };

class PerformanceMetric;
inline double g(const PerformanceMetric& m, double sinr);
inline double g_inverse(const PerformanceMetric& m, double value);

/// Per-user performance function g(SINR). Every kind is continuous, strictly
/// increasing and satisfies g(0) = 0. Error measures (mse, ser4qam) are mapped
/// through g = e(0) - e(SINR) where e is the raw error.
class PerformanceMetric {
 public:
  PerformanceMetric() = default;

  static PerformanceMetric rate() { return PerformanceMetric(MetricKind::rate); }
  static PerformanceMetric mse() { return PerformanceMetric(MetricKind::mse); }
  static PerformanceMetric ser4qam() { return PerformanceMetric(MetricKind::ser4qam); }

  // Piecewise-linear table through (0,0) and the given knots; extrapolated past the
  // last knot with the last slope. Both coordinates must be strictly increasing.
  static PerformanceMetric table(std::vector<double> sinr, std::vector<double> value) {
    if (sinr.size() != value.size() || sinr.empty()) {
      throw ValidationError("metric table: sinr and value must be non-empty and equally long");
    }
    if (sinr.front() != 0.0 || value.front() != 0.0) {
      sinr.insert(sinr.begin(), 0.0);
      value.insert(value.begin(), 0.0);
    }
    for (std::size_t i = 1; i < sinr.size(); ++i) {
      if (!(sinr[i] > sinr[i - 1]) || !(value[i] > value[i - 1])) {
        throw ValidationError("metric table: knots must be strictly increasing from (0,0)");
      }
    }
    PerformanceMetric m(MetricKind::table);
    m.knots_sinr_ = std::move(sinr);
    m.knots_value_ = std::move(value);
    return m;
  }

  MetricKind kind() const { return kind_; }
  const std::vector<double>& table_sinr() const { return knots_sinr_; }
  const std::vector<double>& table_value() const { return knots_value_; }

  std::string name() const {
    switch (kind_) {
      case MetricKind::rate: return "rate";
      case MetricKind::mse: return "mse";
      case MetricKind::ser4qam: return "ser4qam";
      case MetricKind::table: return "table";
    }
    return "rate";
  }

  bool is_error_measure() const { return kind_ == MetricKind::mse || kind_ == MetricKind::ser4qam; }

  /// Supremum of g over [0, inf); +inf for unbounded metrics.
  double supremum() const {
    switch (kind_) {
      case MetricKind::mse: return 1.0;
      case MetricKind::ser4qam: return 0.75;
      default: return std::numeric_limits<double>::infinity();
    }
  }

  bool operator==(const PerformanceMetric&) const = default;

 private:
  explicit PerformanceMetric(MetricKind kind) : kind_(kind) {}

  MetricKind kind_ = MetricKind::rate;
  std::vector<double> knots_sinr_;
  std::vector<double> knots_value_;

  friend double g(const PerformanceMetric&, double);
  friend double g_inverse(const PerformanceMetric&, double);
};

namespace detail {

inline double gaussian_tail(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

// Gray-mapped QPSK symbol error rate with Gaussian interference-plus-noise.
inline double ser_4qam(double sinr) {
  const double q = gaussian_tail(std::sqrt(sinr));
  return 2.0 * q - q * q;
}

}  // namespace detail

/// Raw error measure e(SINR) for error metrics; for rate/table returns g itself.
inline double error_value(const PerformanceMetric& m, double sinr) {
  switch (m.kind()) {
    case MetricKind::mse: return 1.0 / (1.0 + sinr);
    case MetricKind::ser4qam: return detail::ser_4qam(sinr);
    default: return g(m, sinr);
  }
}

inline double g(const PerformanceMetric& m, double sinr) {
  if (!(sinr >= 0.0)) throw ValidationError("performance metric: SINR must be nonnegative");
  switch (m.kind_) {
    case MetricKind::rate: return std::log1p(sinr) / std::log(2.0);
    case MetricKind::mse: return sinr / (1.0 + sinr);
    case MetricKind::ser4qam: {
      // 0.75 - (2Q - Q^2) = (0.5 - Q)(1.5 - Q) with 0.5 - Q = erf(x/sqrt2)/2, no cancellation.
      const double half_erf = 0.5 * std::erf(std::sqrt(sinr / 2.0));
      return half_erf * (1.0 + half_erf);
    }
    case MetricKind::table: {
      const auto& xs = m.knots_sinr_;
      const auto& ys = m.knots_value_;
      auto it = std::upper_bound(xs.begin(), xs.end(), sinr);
      std::size_t hi = static_cast<std::size_t>(it - xs.begin());
      if (hi >= xs.size()) hi = xs.size() - 1;
      const std::size_t lo = hi - 1;
      const double slope = (ys[hi] - ys[lo]) / (xs[hi] - xs[lo]);
      return ys[lo] + slope * (sinr - xs[lo]);
    }
  }
  return 0.0;
}

inline double g_inverse(const PerformanceMetric& m, double value) {
  if (!(value >= 0.0)) throw ValidationError("performance metric: value must be nonnegative");
  if (value == 0.0) return 0.0;
  if (value >= m.supremum()) {
    throw OutOfRangeError("performance metric '" + m.name() + "': value " + std::to_string(value) +
                          " is not attained");
  }
  switch (m.kind_) {
    case MetricKind::rate: return std::expm1(value * std::log(2.0));
    case MetricKind::mse: return value / (1.0 - value);
    case MetricKind::ser4qam: {
      // Monotone bisection on [0, 1e8]; the relative stopping rule keeps small SINRs exact.
      double lo = 0.0;
      double hi = 1e8;
      if (g(m, hi) <= value) return hi;
      for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (g(m, mid) < value) {
          lo = mid;
        } else {
          hi = mid;
        }
        if (hi - lo <= 1e-15 * hi || hi - lo < 1e-300) break;
      }
      return 0.5 * (lo + hi);
    }
    case MetricKind::table: {
      const auto& xs = m.knots_sinr_;
      const auto& ys = m.knots_value_;
      auto it = std::upper_bound(ys.begin(), ys.end(), value);
      std::size_t hi = static_cast<std::size_t>(it - ys.begin());
      if (hi >= ys.size()) hi = ys.size() - 1;
      const std::size_t lo = hi - 1;
      const double slope = (xs[hi] - xs[lo]) / (ys[hi] - ys[lo]);
      return xs[lo] + slope * (value - ys[lo]);
    }
  }
  return 0.0;
}

}  // namespace mimo_pareto
