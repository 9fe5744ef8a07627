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

#include "minifleet/control/pid.hpp"

#include <algorithm>
#include <cmath>

#include "minifleet/control/mpc.hpp"

namespace minifleet::control {

PidController::PidController(const PidGains& gains, const ModelParams& model,
                             double dt)
    : gains_(gains), model_(model), dt_(dt) {}

void PidController::reset() {
  speed_integral_ = 0.0;
  previous_cross_track_ = 0.0;
  has_previous_ = false;
}

ControlInput PidController::step(const StateEstimate& estimate,
                                 const Trajectory& trajectory,
                                 double battery_voltage, int lookahead_steps) {
  const double t_ref = estimate.t + (lookahead_steps + 1) * dt_;
  const ReferenceSample ref = trajectory.interpolate(t_ref);
  const VehicleState& z = estimate.state;

  const double ref_speed = std::hypot(ref.vx, ref.vy);
  const bool moving = ref_speed > 0.05;
  const double path_heading = moving ? std::atan2(ref.vy, ref.vx) : z.psi;

  // Cross-track error: positive when the vehicle is left of the path.
  const double ex = z.x - ref.x;
  const double ey = z.y - ref.y;
  const double cross = -std::sin(path_heading) * ex +
                       std::cos(path_heading) * ey;
  const double heading_error = std::remainder(z.psi - path_heading, 2.0 * M_PI);
  const double cross_rate =
      has_previous_ ? (cross - previous_cross_track_) / dt_ : 0.0;
  previous_cross_track_ = cross;
  has_previous_ = true;

  const double steer = -(gains_.steer_cross_track * cross +
                         gains_.steer_cross_track_rate * cross_rate +
                         gains_.steer_heading * heading_error) -
                       gains_.steer_trim * model_.p9;

  const double speed_error = ref_speed - z.v;
  speed_integral_ += speed_error * dt_;
  if (gains_.speed_ki > 0.0) {
    const double limit = 0.5 / gains_.speed_ki;  // anti-windup
    speed_integral_ = std::clamp(speed_integral_, -limit, limit);
  }
  const double v_target = gains_.speed_feedforward * ref_speed +
                          gains_.speed_kp * speed_error +
                          gains_.speed_ki * speed_integral_;
  const double motor = steady_state_motor(v_target, battery_voltage, model_);

  return {clamp_command(motor), clamp_command(steer), battery_voltage};
}

}  // namespace minifleet::control
