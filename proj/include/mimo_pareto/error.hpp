// Copyright 2026 The mimo_pareto Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace mimo_pareto {

// Invalid scenario, strategy, profile or option.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Value outside the range of a bounded performance metric.
class OutOfRangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Numerical breakdown inside the cone solver.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Extracted duals do not satisfy the sum normalization at a boundary point.
class DualNormalizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mimo_pareto
