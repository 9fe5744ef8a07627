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

#ifndef MINIFLEET_CONTROL_ESTIMATOR_HPP_
#define MINIFLEET_CONTROL_ESTIMATOR_HPP_

#include <deque>
#include <optional>

#include "minifleet/dynamics.hpp"

namespace minifleet::control {

/// Absolute pose fix, tagged with the timestep at which it was measured
/// (delivery may lag by the positioning-system delay).
struct IpsFix {
  double x{0.0};
  double y{0.0};
  double psi{0.0};
  int measured_step{0};
};

/// Onboard sensor data for one 20 ms frame.
struct SensorFrame {
  double odometer_speed{0.0};       // [m/s], over the last frame
  double yaw_rate{0.0};             // [rad/s], over the last frame
  double battery_voltage{kNominalVoltage};
  std::optional<IpsFix> ips;        // absent on loss — the normal degraded path
};

struct StateEstimate {
  VehicleState state;
  double t{0.0};
  int step{0};
  int ips_age_steps{-1};  // -1 until the first fix arrives
  bool has_fix{false};
};

/// Rebase-and-replay dead reckoner.
///
/// Each tick advances the pose with the grey-box position model driven by
/// the filtered odometer speed and the gyro yaw rate. When a (possibly
/// stale) absolute fix arrives, the pose at the fix's timestep is replaced
/// and the buffered frames are replayed to the present, which compensates
/// the fix transmission delay exactly. The speed channel blends the model
/// prediction with the quantized odometer reading (complementary filter,
/// gain odometer_blend).
class StateEstimator {
 public:
  StateEstimator(const ModelParams& model, double dt,
                 int history_capacity = 64, double odometer_blend = 0.2);

  /// Starts over from a known state at the given step.
  void reset(const VehicleState& state, int step);

  /// Advances one step to `step = current + 1` and folds in the frame's
  /// sensors. `effective_input` is the command the actuators held during the
  /// elapsed frame.
  const StateEstimate& update(const SensorFrame& sensors,
                              const ControlInput& effective_input);

  const StateEstimate& current() const { return estimate_; }

 private:
  struct Frame {
    VehicleState state;  // estimate at this step
    double odometer_speed{0.0};
    double yaw_rate{0.0};
    ControlInput input;  // effective during the frame ending at this step
  };

  VehicleState dead_reckon(const VehicleState& from, const Frame& frame) const;

  ModelParams model_;
  double dt_;
  int capacity_;
  double odometer_blend_;
  StateEstimate estimate_;
  std::deque<Frame> history_;  // back() is the current step
};

}  // namespace minifleet::control

#endif  // MINIFLEET_CONTROL_ESTIMATOR_HPP_
