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

#ifndef MINIFLEET_CONTROL_MPC_HPP_
#define MINIFLEET_CONTROL_MPC_HPP_

#include <span>
#include <vector>

#include "minifleet/control/estimator.hpp"
#include "minifleet/control/messages.hpp"
#include "minifleet/kernels/rollout.hpp"
#include "minifleet/trajectory.hpp"

namespace minifleet::control {

/// Finite-horizon tracking solver settings. Weights balance squared
/// position/yaw/speed tracking errors against input magnitude and rate; the
/// yaw error uses the periodic chord metric (2 sin(dpsi/2))^2 gated by the
/// reference speed so standstill references do not fight the heading.
struct MpcConfig {
  int horizon{25};
  double dt{kDefaultTimestep};
  double weight_position{100.0};
  double weight_yaw{2.0};
  double weight_speed{4.0};
  double weight_input{0.01};
  double weight_input_rate{2.0};
  double bound_m{1.0};
  double bound_d{1.0};
  int max_iterations{30};
  double fd_step{1e-6};
  double armijo_constant{1e-4};
  double armijo_shrink{0.5};
  double step_growth{2.0};
  double initial_step{0.2};
  kernels::Backend backend{kernels::Backend::kAuto};
};

struct MpcDiagnostics {
  int iterations{0};
  double cost_initial{0.0};
  double cost_final{0.0};
  bool safe_stop{false};
  std::vector<double> cost_history;  // initial + each accepted iterate
};

/// Projected-gradient MPC over the input sequence with warm starting.
class TrackingMpc {
 public:
  TrackingMpc(const MpcConfig& config, const ModelParams& model);

  /// Computes the next command. `pending` are the already-commanded inputs
  /// that have not yet reached the actuators (oldest first); the estimate is
  /// forward-simulated through them before the horizon starts, which
  /// compensates the actuation delay.
  ControlInput step(const StateEstimate& estimate, const Trajectory& trajectory,
                    std::span<const DirectInput> pending,
                    double battery_voltage, MpcDiagnostics* diagnostics = nullptr);

  /// One solve of the tracking problem from predicted state `z0` at time
  /// `t0`, starting the iteration from `warm_start` (resized/truncated to the
  /// horizon; empty means all-zero). Exposed for direct testing.
  std::vector<DirectInput> solve(const VehicleState& z0, double t0,
                                 const Trajectory& trajectory,
                                 const DirectInput& previous_command,
                                 std::span<const DirectInput> warm_start,
                                 double battery_voltage,
                                 MpcDiagnostics* diagnostics = nullptr);

  void reset() { plan_.clear(); }
  const std::vector<DirectInput>& plan() const { return plan_; }

 private:
  MpcConfig cfg_;
  ModelParams model_;
  std::vector<DirectInput> plan_;
};

/// Motor command whose steady state holds the target speed at the given
/// battery voltage: inverts 0 = p5*v + (p6 + p7*u)*sign(m)*|m|^p8.
/// Returns 0 when the drive gain is non-positive or the target is 0.
double steady_state_motor(double v_target, double battery_voltage,
                          const ModelParams& p);
/// Steady-state speed reached with constant motor command m.
double steady_state_speed(double m, double battery_voltage,
                          const ModelParams& p);

}  // namespace minifleet::control

#endif  // MINIFLEET_CONTROL_MPC_HPP_
