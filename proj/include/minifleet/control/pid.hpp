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

#ifndef MINIFLEET_CONTROL_PID_HPP_
#define MINIFLEET_CONTROL_PID_HPP_

#include "minifleet/control/estimator.hpp"
#include "minifleet/trajectory.hpp"

namespace minifleet::control {

/// Baseline follower gains. Speed: PI around the reference speed, mapped
/// through the inverse steady-state motor law (the feedforward is gated by
/// speed_feedforward so an all-zero gain set outputs zero commands).
/// Steering: PD on cross-track plus heading error, with the model's steering
/// offset trimmed out via steer_trim.
struct PidGains {
  double speed_feedforward{1.0};
  double speed_kp{0.8};
  double speed_ki{0.5};        // [1/s]
  double steer_cross_track{2.2};   // [1/m]
  double steer_cross_track_rate{0.3};  // [s/m]
  double steer_heading{1.4};
  double steer_trim{1.0};
};

class PidController {
 public:
  PidController(const PidGains& gains, const ModelParams& model, double dt);

  /// `lookahead_steps` shifts the reference query to compensate actuation
  /// delay.
  ControlInput step(const StateEstimate& estimate,
                    const Trajectory& trajectory, double battery_voltage,
                    int lookahead_steps);
  void reset();

 private:
  PidGains gains_;
  ModelParams model_;
  double dt_;
  double speed_integral_{0.0};
  double previous_cross_track_{0.0};
  bool has_previous_{false};
};

}  // namespace minifleet::control

#endif  // MINIFLEET_CONTROL_PID_HPP_
