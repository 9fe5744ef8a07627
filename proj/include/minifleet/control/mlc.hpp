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

#ifndef MINIFLEET_CONTROL_MLC_HPP_
#define MINIFLEET_CONTROL_MLC_HPP_

#include <span>
#include <string>
#include <vector>

#include "minifleet/control/estimator.hpp"
#include "minifleet/control/messages.hpp"
#include "minifleet/control/mpc.hpp"
#include "minifleet/control/pid.hpp"

namespace minifleet::control {

enum class OperatingMode {
  kExternalControl,
  kTrajectoryFollowing,
};

enum class ControllerType { kMpc, kPid, kNone };

struct MlcConfig {
  ControllerType controller{ControllerType::kMpc};
  MpcConfig mpc{};
  PidGains pid{};
  ModelParams model{};
  double dt{kDefaultTimestep};
  int actuation_delay_steps{5};
  int estimator_history{64};
  double odometer_blend{0.2};
};

struct MlcTickOutput {
  ControlInput command;
  VehicleStateMsg state_message;
  OperatingMode mode{OperatingMode::kTrajectoryFollowing};
  bool safe_stop{false};
  StateEstimate estimate;
  MpcDiagnostics mpc_diagnostics;
};

/// Per-vehicle onboard control loop, ticked once per 20 ms step.
///
/// A direct-input message received this tick switches to external control
/// and the input is applied verbatim (clamped). Otherwise, trajectory
/// following runs the configured controller once a trajectory and a
/// positioning fix exist; anything else is a safe stop (zero command).
/// External control lasts until a trajectory segment arrives in a tick with
/// no newer direct input. Trajectory segments only ever append: points that
/// do not extend the stored reference are rejected and counted, so received
/// updates never change the existing reference.
///
/// Instances share no mutable state; one vehicle per instance, one tick per
/// step, inbox handed in as an immutable snapshot.
class MidLevelController {
 public:
  explicit MidLevelController(const MlcConfig& config);

  /// `inbox` holds wire-encoded messages delivered this tick, in delivery
  /// order. Malformed entries are counted and skipped.
  MlcTickOutput tick(std::span<const std::string> inbox,
                     const SensorFrame& sensors);

  OperatingMode mode() const { return mode_; }
  const Trajectory& trajectory() const { return trajectory_; }
  int malformed_messages() const { return malformed_messages_; }
  int rejected_trajectory_points() const { return rejected_points_; }
  /// Command the actuators hold during the frame that starts at tick s
  /// (commanded actuation_delay_steps earlier; neutral before any command
  /// reaches them).
  DirectInput applied_command(int step) const;

 private:
  ControlInput run_controller();

  MlcConfig cfg_;
  StateEstimator estimator_;
  TrackingMpc mpc_;
  PidController pid_;
  Trajectory trajectory_;
  OperatingMode mode_{OperatingMode::kTrajectoryFollowing};
  std::vector<DirectInput> commands_;  // index = tick
  DirectInput last_direct_{};
  int malformed_messages_{0};
  int rejected_points_{0};
  int tick_index_{0};
  MpcDiagnostics last_mpc_diagnostics_;
  double battery_voltage_{kNominalVoltage};
};

}  // namespace minifleet::control

#endif  // MINIFLEET_CONTROL_MLC_HPP_
