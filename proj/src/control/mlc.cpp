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

#include "minifleet/control/mlc.hpp"

#include <algorithm>

namespace minifleet::control {

MidLevelController::MidLevelController(const MlcConfig& config)
    : cfg_(config),
      estimator_(config.model, config.dt, config.estimator_history,
                 config.odometer_blend),
      mpc_(config.mpc, config.model),
      pid_(config.pid, config.model, config.dt) {}

DirectInput MidLevelController::applied_command(int step) const {
  const int commanded = step - cfg_.actuation_delay_steps;
  if (commanded < 0 || commanded >= static_cast<int>(commands_.size())) {
    return DirectInput{};
  }
  return commands_[commanded];
}

ControlInput MidLevelController::run_controller() {
  const StateEstimate& est = estimator_.current();
  if (cfg_.controller == ControllerType::kMpc) {
    // Commands already issued but not yet at the actuators.
    std::vector<DirectInput> pending;
    for (int s = tick_index_ - cfg_.actuation_delay_steps; s < tick_index_;
         ++s) {
      pending.push_back(s >= 0 && s < static_cast<int>(commands_.size())
                            ? commands_[s]
                            : DirectInput{});
    }
    return mpc_.step(est, trajectory_, pending, battery_voltage_,
                     &last_mpc_diagnostics_);
  }
  if (cfg_.controller == ControllerType::kPid) {
    return pid_.step(est, trajectory_, battery_voltage_,
                     cfg_.actuation_delay_steps);
  }
  return {0.0, 0.0, battery_voltage_};
}

MlcTickOutput MidLevelController::tick(std::span<const std::string> inbox,
                                       const SensorFrame& sensors) {
  battery_voltage_ = sensors.battery_voltage;

  // The command that drove the frame which just elapsed.
  const DirectInput effective = applied_command(tick_index_ - 1);
  const StateEstimate& est = estimator_.update(
      sensors, {effective.m, effective.d, sensors.battery_voltage});

  bool direct_this_tick = false;
  bool trajectory_this_tick = false;
  for (const std::string& text : inbox) {
    MessagePayload payload;
    try {
      payload = decode_message(text);
    } catch (const std::runtime_error&) {
      ++malformed_messages_;
      continue;
    }
    if (const auto* direct = std::get_if<DirectInput>(&payload)) {
      last_direct_ = *direct;
      direct_this_tick = true;
    } else if (const auto* segment = std::get_if<TrajectorySegment>(&payload)) {
      trajectory_this_tick = true;
      for (const TrajectoryPoint& pt : segment->points) {
        if (!trajectory_.append(pt)) ++rejected_points_;
      }
    }
    // Vehicle-state messages from peers are ignored.
  }

  if (direct_this_tick) {
    mode_ = OperatingMode::kExternalControl;
  } else if (mode_ == OperatingMode::kExternalControl && trajectory_this_tick) {
    mode_ = OperatingMode::kTrajectoryFollowing;
    mpc_.reset();
    pid_.reset();
  }

  MlcTickOutput out;
  out.estimate = est;
  if (direct_this_tick) {
    out.command = {clamp_command(last_direct_.m), clamp_command(last_direct_.d),
                   battery_voltage_};
  } else if (mode_ == OperatingMode::kTrajectoryFollowing &&
             !trajectory_.empty() && est.has_fix &&
             cfg_.controller != ControllerType::kNone) {
    out.command = run_controller();
    out.command.m = clamp_command(out.command.m);
    out.command.d = clamp_command(out.command.d);
  } else {
    out.command = {0.0, 0.0, battery_voltage_};
    out.safe_stop = true;
  }
  out.mode = mode_;
  out.mpc_diagnostics = last_mpc_diagnostics_;

  commands_.push_back({out.command.m, out.command.d});

  const DirectInput at_actuator = applied_command(tick_index_);
  out.state_message = VehicleStateMsg{est.t,
                                      est.state.x,
                                      est.state.y,
                                      est.state.psi,
                                      est.state.v,
                                      at_actuator.m,
                                      at_actuator.d,
                                      est.ips_age_steps};
  ++tick_index_;
  return out;
}

}  // namespace minifleet::control
