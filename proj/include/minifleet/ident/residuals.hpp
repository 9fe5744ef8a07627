// Copyright 2026 The Minifleet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MINIFLEET_IDENT_RESIDUALS_HPP_
#define MINIFLEET_IDENT_RESIDUALS_HPP_

#include <span>
#include <vector>

#include "minifleet/ident/ident.hpp"

// Residual evaluation shared by objective() and the LM fit.
//
// Residual layout for one window of L aligned samples: 4*L entries ordered
// sample-major with channels (x, y, yaw, speed). Channels are sqrt-weighted
// so the squared norm of a window's residuals equals its pose_error sum;
// the yaw entry is sqrt(w_yaw) * sin(dpsi/2).
//
// Canonical cost accumulation: per-window subtotal in residual order, then
// window subtotals summed in window order. Every cost reported anywhere in
// the ident module uses this order, which makes re-evaluation bitwise
// reproducible.

namespace minifleet::ident::detail {

/// One decision-vector realization for a window rollout.
struct Variant {
  ModelParams params;
  VehicleState init;
};

/// Residuals of one window for each variant. residuals[v] has
/// 4 * window.size() entries; finite[v] tells whether the whole rollout and
/// residual vector stayed finite. Batches kernels::kLaneCount variants per
/// rollout call.
void window_variant_residuals(const AlignedExperiment& window,
                              std::span<const Variant> variants,
                              const ErrorWeights& weights,
                              kernels::Backend backend,
                              std::vector<std::vector<double>>& residuals,
                              std::vector<char>& finite);

double window_cost(std::span<const double> residuals);

/// Objective at a single parameter vector; batches up to kLaneCount windows
/// per rollout call (lanes = windows). Returns kDivergencePenalty when any
/// window goes non-finite.
double batched_objective(std::span<const AlignedExperiment> windows,
                         const ModelParams& params, const ErrorWeights& weights,
                         std::span<const VehicleState> init_overrides,
                         ObjectiveDiagnostics* diagnostics,
                         kernels::Backend backend);

}  // namespace minifleet::ident::detail

#endif  // MINIFLEET_IDENT_RESIDUALS_HPP_
