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

#include "minifleet/control/estimator.hpp"

#include <cmath>

namespace minifleet::control {

StateEstimator::StateEstimator(const ModelParams& model, double dt,
                               int history_capacity, double odometer_blend)
    : model_(model),
      dt_(dt),
      capacity_(history_capacity),
      odometer_blend_(odometer_blend) {
  // The first update() lands on step 0.
  estimate_.step = -1;
  estimate_.t = -dt;
}

void StateEstimator::reset(const VehicleState& state, int step) {
  history_.clear();
  history_.push_back({state, state.v, 0.0, {}});
  estimate_ = StateEstimate{state, step * dt_, step, -1, false};
}

VehicleState StateEstimator::dead_reckon(const VehicleState& from,
                                         const Frame& frame) const {
  // Position advances with the grey-box kinematics at the frame-start speed
  // estimate; heading integrates the gyro; speed is the model prediction
  // pulled toward the odometer reading.
  const double d = clamp_command(frame.input.d);
  const double m = clamp_command(frame.input.m);
  const double s = d + model_.p9;
  const double lateral = 1.0 + model_.p2 * (s * s);
  const double speed = model_.p1 * from.v * lateral;
  const double heading = from.psi + model_.p3 * s + model_.p10;
  double motor = 0.0;
  if (m > 0.0) {
    motor = std::pow(m, model_.p8);
  } else if (m < 0.0) {
    motor = -std::pow(-m, model_.p8);
  }
  VehicleState next;
  next.x = from.x + dt_ * (speed * std::cos(heading));
  next.y = from.y + dt_ * (speed * std::sin(heading));
  next.psi = from.psi + dt_ * frame.yaw_rate;
  const double v_model =
      from.v + dt_ * (model_.p5 * from.v +
                      (model_.p6 + model_.p7 * frame.input.u) * motor);
  next.v = v_model + odometer_blend_ * (frame.odometer_speed - v_model);
  return next;
}

const StateEstimate& StateEstimator::update(const SensorFrame& sensors,
                                            const ControlInput& effective_input) {
  Frame frame;
  frame.odometer_speed = sensors.odometer_speed;
  frame.yaw_rate = sensors.yaw_rate;
  frame.input = effective_input;

  const VehicleState& previous =
      history_.empty() ? estimate_.state : history_.back().state;
  frame.state = dead_reckon(previous, frame);
  history_.push_back(frame);
  while (static_cast<int>(history_.size()) > capacity_) {
    history_.pop_front();
  }

  estimate_.step += 1;
  estimate_.t = estimate_.step * dt_;
  if (estimate_.has_fix && estimate_.ips_age_steps >= 0) {
    estimate_.ips_age_steps += 1;
  }

  if (sensors.ips.has_value()) {
    const IpsFix& fix = *sensors.ips;
    const int now = estimate_.step;
    const int oldest = now - static_cast<int>(history_.size()) + 1;
    if (fix.measured_step >= oldest && fix.measured_step <= now) {
      const std::size_t idx =
          history_.size() - 1 - static_cast<std::size_t>(now - fix.measured_step);
      history_[idx].state.x = fix.x;
      history_[idx].state.y = fix.y;
      history_[idx].state.psi = fix.psi;
      for (std::size_t i = idx + 1; i < history_.size(); ++i) {
        history_[i].state = dead_reckon(history_[i - 1].state, history_[i]);
      }
      estimate_.ips_age_steps = now - fix.measured_step;
      estimate_.has_fix = true;
    }
  }

  estimate_.state = history_.back().state;
  return estimate_;
}

}  // namespace minifleet::control
