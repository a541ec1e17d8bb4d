// Copyright 2026 The mimo_pareto Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mimo_pareto/cone_program.hpp"
#include "mimo_pareto/error.hpp"
#include "mimo_pareto/explicit_param.hpp"
#include "mimo_pareto/feasibility.hpp"
#include "mimo_pareto/generator.hpp"
#include "mimo_pareto/implicit_boundary.hpp"
#include "mimo_pareto/interior_point.hpp"
#include "mimo_pareto/linalg.hpp"
#include "mimo_pareto/metrics.hpp"
#include "mimo_pareto/oracle.hpp"
#include "mimo_pareto/parallel.hpp"
#include "mimo_pareto/region.hpp"
#include "mimo_pareto/scenario.hpp"
#include "mimo_pareto/scenario_io.hpp"
#include "mimo_pareto/verify.hpp"
#include "mimo_pareto/version.hpp"
