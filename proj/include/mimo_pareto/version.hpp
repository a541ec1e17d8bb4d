// Copyright 2026 The mimo_pareto Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace mimo_pareto {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace mimo_pareto
