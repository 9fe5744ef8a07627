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

#ifndef MINIFLEET_IDENT_ESTIMATE_HPP_
#define MINIFLEET_IDENT_ESTIMATE_HPP_

#include <string>
#include <vector>

#include "minifleet/ident/ident.hpp"

namespace minifleet::ident {

/// Levenberg-Marquardt settings. The residual vector holds one entry per
/// sample and channel, sqrt-weighted so the squared norm equals the
/// objective; the yaw channel residual is sqrt(w_yaw) * sin(dpsi/2).
/// Gradient means J^T r of that residual vector.
struct FitOptions {
  InitMode init_mode{InitMode::kMeasured};
  ErrorWeights weights{};
  int max_iterations{200};
  double fd_relative_step{1e-6};
  double fd_step_floor{1e-8};
  double lambda_init{1e-3};
  double lambda_scale{10.0};
  double gradient_tolerance{1e-8};
  double step_tolerance{1e-10};
  kernels::Backend backend{kernels::Backend::kAuto};
};

struct FitDiagnostics {
  int iterations{0};
  std::string termination;  // gradient_tol | step_tol | max_iter | stalled |
                            // nonfinite_initial
  int objective_evaluations{0};
  int jacobian_evaluations{0};
  int damping_increases{0};
  int singular_solves{0};
  bool penalty_hit{false};
  bool tie_break_applied{false};   // set by delay_grid_search
  bool gauge_normalized{false};    // winning delays rewritten to the
                                   // canonical min(ips, local) = 0 member
  std::vector<double> objective_history;  // initial value + accepted steps
  // Decision-vector indices whose residuals carry no information (zero
  // normal-equation diagonal at the last Jacobian); non-empty means the data
  // cannot identify those parameters.
  std::vector<int> unidentifiable_params;
};

struct FitResult {
  ModelParams params;
  DelayConfig delays;
  double objective{0.0};
  std::vector<double> window_objectives;
  std::vector<VehicleState> fitted_inits;  // kFree only, one per window
  FitDiagnostics diagnostics;
};

/// Damped Gauss-Newton fit of the grey-box parameters (and, with kFree, the
/// per-window initial states) on delay-aligned windows. Deterministic:
/// identical inputs and options produce a bitwise-identical result.
FitResult estimate_parameters(std::span<const Experiment> experiments,
                              const DelayConfig& delays,
                              const ModelParams& initial_params,
                              const FitOptions& options);

struct DelayRanges {
  int ips_min{0}, ips_max{3};
  int local_min{0}, local_max{2};
  int actuation_min{0}, actuation_max{8};
};

struct GridCell {
  DelayConfig delays;
  bool solved{false};
  double objective{0.0};
  std::string termination;
  std::string error;  // set when the cell failed outright
};

struct GridReport {
  std::vector<GridCell> cells;
};

/// Exhaustive outer loop over every delay combination; each cell runs
/// estimate_parameters and the lowest objective wins. Exact ties keep the
/// lexicographically smallest (actuation, ips, local) triple; the winning
/// triple is then reported in canonical gauge (min(ips, local) = 0, see the
/// note in delay_grid_search). Throws std::runtime_error listing per-cell
/// reasons when every combination fails.
FitResult delay_grid_search(std::span<const Experiment> experiments,
                            const DelayRanges& ranges,
                            const ModelParams& initial_params,
                            const FitOptions& options,
                            GridReport* report = nullptr);

}  // namespace minifleet::ident

#endif  // MINIFLEET_IDENT_ESTIMATE_HPP_
