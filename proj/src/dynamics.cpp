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

#include "minifleet/dynamics.hpp"

#include <cmath>

namespace minifleet {

namespace {

void require_steering_domain(double delta) {
  if (!(std::abs(delta) < M_PI / 2.0)) {
    throw std::domain_error("steering angle out of domain: |delta| = " +
                            std::to_string(std::abs(delta)) + " >= pi/2");
  }
}

}  // namespace

PhysicalParams PhysicalParams::defaults() {
  PhysicalParams phys;
  phys.wheelbase = 0.15;
  phys.rear_to_ref = 0.075;
  // Steering range reproducing the 0.3 m minimum turning radius at the rear
  // axle: tan(delta_max) = L / R_min.
  phys.max_steering_angle = std::atan(phys.wheelbase / 0.3);
  phys.max_input_speed = 3.7;
  // Speed lag matched to the reference calibration so the physical and
  // grey-box models reach the same steady-state speed at nominal voltage.
  const ModelParams ref = ModelParams::reference_fit();
  phys.speed_time_constant = -1.0 / ref.p5;
  const double v_ss = -(ref.p6 + ref.p7 * kNominalVoltage) / ref.p5;
  phys.speed_gain = v_ss / phys.max_input_speed;
  return phys;
}

ModelParams ModelParams::reference_fit() {
  ModelParams p;
  p.p1 = 1.00;
  p.p2 = -0.14;
  p.p3 = 0.20;
  p.p4 = 3.56;
  p.p5 = -2.19;
  p.p6 = -9.73;
  p.p7 = 2.52;
  p.p8 = 1.32;
  p.p9 = 0.03;
  p.p10 = -0.01;
  return p;
}

double steering_command_to_angle(double d, const PhysicalParams& phys) {
  return phys.max_steering_angle * clamp_command(d);
}

double side_slip_exact(double delta, const PhysicalParams& phys) {
  require_steering_domain(delta);
  const double ratio = phys.rear_to_ref / phys.wheelbase;
  return std::atan(ratio * std::tan(delta));
}

double side_slip_taylor(double delta, const PhysicalParams& phys) {
  return (phys.rear_to_ref / phys.wheelbase) * delta;
}

double center_speed_exact(double v, double delta, const PhysicalParams& phys) {
  require_steering_domain(delta);
  const double a = (phys.rear_to_ref / phys.wheelbase) * std::tan(delta);
  return v * std::sqrt(1.0 + a * a);
}

double center_speed_taylor(double v, double delta,
                           const PhysicalParams& phys) {
  const double ratio = phys.rear_to_ref / phys.wheelbase;
  return v * (1.0 + ratio * ratio * delta * delta);
}

StateDerivative physical_derivative(const VehicleState& state,
                                    const ControlInput& input,
                                    const PhysicalParams& phys) {
  const double delta = steering_command_to_angle(input.d, phys);
  const double beta = side_slip_exact(delta, phys);
  const double vc = center_speed_exact(state.v, delta, phys);
  const double v_in = phys.max_input_speed * clamp_command(input.m) *
                      (input.u / kNominalVoltage);
  StateDerivative out;
  out.dx = vc * std::cos(state.psi + beta);
  out.dy = vc * std::sin(state.psi + beta);
  out.dpsi = state.v * std::tan(delta) / phys.wheelbase;
  out.dv = -state.v / phys.speed_time_constant +
           (phys.speed_gain / phys.speed_time_constant) * v_in;
  return out;
}

VehicleState euler_step(const VehicleState& state, const StateDerivative& f,
                        double dt) {
  VehicleState next;
  next.x = state.x + dt * f.dx;
  next.y = state.y + dt * f.dy;
  next.psi = state.psi + dt * f.dpsi;
  next.v = state.v + dt * f.dv;
  if (!std::isfinite(next.x)) throw IntegrationError("x", next.x);
  if (!std::isfinite(next.y)) throw IntegrationError("y", next.y);
  if (!std::isfinite(next.psi)) throw IntegrationError("psi", next.psi);
  if (!std::isfinite(next.v)) throw IntegrationError("v", next.v);
  return next;
}

VehicleState euler_step(const VehicleState& state, const ControlInput& input,
                        const ModelParams& p, double dt) {
  return euler_step(state, parameterized_derivative(state, input, p), dt);
}

VehicleState euler_step(const VehicleState& state, const ControlInput& input,
                        const PhysicalParams& phys, double dt) {
  return euler_step(state, physical_derivative(state, input, phys), dt);
}

namespace {

template <typename Params>
std::vector<VehicleState> simulate_impl(const VehicleState& initial,
                                        std::span<const ControlInput> inputs,
                                        const Params& params, double dt) {
  std::vector<VehicleState> states;
  states.reserve(inputs.size() + 1);
  states.push_back(initial);
  for (const ControlInput& input : inputs) {
    states.push_back(euler_step(states.back(), input, params, dt));
  }
  return states;
}

}  // namespace

std::vector<VehicleState> simulate(const VehicleState& initial,
                                   std::span<const ControlInput> inputs,
                                   const ModelParams& p, double dt) {
  return simulate_impl(initial, inputs, p, dt);
}

std::vector<VehicleState> simulate(const VehicleState& initial,
                                   std::span<const ControlInput> inputs,
                                   const PhysicalParams& phys, double dt) {
  return simulate_impl(initial, inputs, phys, dt);
}

ModelParams grey_box_equivalent(const PhysicalParams& phys) {
  const double ratio = phys.rear_to_ref / phys.wheelbase;
  const double dmax = phys.max_steering_angle;
  ModelParams p;
  p.p1 = 1.0;
  p.p2 = 0.5 * ratio * ratio * dmax * dmax;
  p.p3 = ratio * dmax;
  p.p4 = dmax / phys.wheelbase;
  p.p5 = -1.0 / phys.speed_time_constant;
  p.p6 = 0.0;
  p.p7 = phys.speed_gain * phys.max_input_speed /
         (phys.speed_time_constant * kNominalVoltage);
  p.p8 = 1.0;
  p.p9 = 0.0;
  p.p10 = 0.0;
  return p;
}

}  // namespace minifleet
