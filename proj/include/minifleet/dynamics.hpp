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

#ifndef MINIFLEET_DYNAMICS_HPP_
#define MINIFLEET_DYNAMICS_HPP_

#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace minifleet {

// 50 Hz control/measurement grid shared by the whole stack.
inline constexpr double kDefaultTimestep = 0.02;  // [s]
// Battery voltage the motor law is normalized to.
inline constexpr double kNominalVoltage = 7.4;  // [V]

/// Pose and rear-axle speed of one vehicle. The yaw angle is stored
/// unwrapped; comparisons go through the periodic metric in the ident module.
struct VehicleState {
  double x{0.0};    // position [m]
  double y{0.0};    // position [m]
  double psi{0.0};  // yaw angle [rad], unwrapped
  double v{0.0};    // rear-axle speed [m/s]

  bool all_finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(psi) &&
           std::isfinite(v);
  }
};

/// Actuator command pair plus the battery voltage that scales the motor.
/// m and d are clamped to [-1, 1] before any model evaluation; u is a
/// measured quantity (LiPo range 6.0 V to 8.4 V), not a controller output.
struct ControlInput {
  double m{0.0};              // motor command, dimensionless
  double d{0.0};              // steering command, dimensionless
  double u{kNominalVoltage};  // battery voltage [V]
};

/// Geometric and drivetrain constants of the physical vehicle model.
struct PhysicalParams {
  double wheelbase{0.15};           // L, front-to-rear axle distance [m]
  double rear_to_ref{0.075};        // l_r, rear axle to reference point [m]
  double speed_gain{1.0};           // K_v of the first-order speed lag
  double speed_time_constant{0.5};  // T_v [s]
  double max_steering_angle{0.5};   // delta at d = 1 [rad]
  double max_input_speed{3.7};      // v_in at m = 1, nominal voltage [m/s]

  // Stock 1:18 vehicle: 0.15 m wheelbase, reference point at the geometric
  // center, steering range set by the 0.3 m minimum turning radius, speed
  // lag matched to the reference grey-box calibration.
  static PhysicalParams defaults();

  bool valid() const {
    return wheelbase > 0.0 && rear_to_ref >= 0.0 &&
           rear_to_ref <= wheelbase && speed_time_constant > 0.0 &&
           max_steering_angle > 0.0 && max_steering_angle < M_PI / 2.0;
  }
};

/// Grey-box model parameters p1..p10.
///
///   xdot   = p1 * v * (1 + p2*(d+p9)^2) * cos(psi + p3*(d+p9) + p10)
///   ydot   = p1 * v * (1 + p2*(d+p9)^2) * sin(psi + p3*(d+p9) + p10)
///   psidot = p4 * v * (d+p9)
///   vdot   = p5 * v + (p6 + p7*u) * sign(m) * |m|^p8
///
/// p5 < 0 keeps the speed dynamics stable and p8 > 0 keeps the motor power
/// law well defined. Default values are a near-nominal starting point for
/// identification (unit position gain, stable speed pole).
struct ModelParams {
  double p1{1.0};
  double p2{0.0};
  double p3{0.5};
  double p4{3.0};
  double p5{-2.0};
  double p6{0.0};
  double p7{1.0};
  double p8{1.0};
  double p9{0.0};
  double p10{0.0};

  /// Calibration fitted on a real 1:18 vehicle; the stock model used by the
  /// simulator and the tests.
  static ModelParams reference_fit();

  std::array<double, 10> to_array() const {
    return {p1, p2, p3, p4, p5, p6, p7, p8, p9, p10};
  }
  static ModelParams from_array(const std::array<double, 10>& a) {
    return {a[0], a[1], a[2], a[3], a[4], a[5], a[6], a[7], a[8], a[9]};
  }

  bool all_finite() const {
    for (double value : to_array()) {
      if (!std::isfinite(value)) return false;
    }
    return true;
  }
  bool stable() const { return all_finite() && p5 < 0.0 && p8 > 0.0; }
};

/// Time derivative of VehicleState.
struct StateDerivative {
  double dx{0.0};    // [m/s]
  double dy{0.0};    // [m/s]
  double dpsi{0.0};  // [rad/s]
  double dv{0.0};    // [m/s^2]
};

/// Thrown when an integration step produces a non-finite state; names the
/// first offending field.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& field, double value)
      : std::runtime_error("non-finite state after integration step: field '" +
                           field + "' = " + std::to_string(value)),
        field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

inline double clamp_command(double c) {
  return c < -1.0 ? -1.0 : (c > 1.0 ? 1.0 : c);
}

/// Linear steering map: delta = max_steering_angle * d, with d clamped to
/// [-1, 1].
double steering_command_to_angle(double d, const PhysicalParams& phys);

/// Kinematic side-slip angle beta = atan((l_r/L) * tan(delta)).
/// Throws std::domain_error for |delta| >= pi/2.
double side_slip_exact(double delta, const PhysicalParams& phys);

/// First-order approximation beta = (l_r/L) * delta.
double side_slip_taylor(double delta, const PhysicalParams& phys);

/// Reference-point speed v_c = v * sqrt(1 + ((l_r/L) tan(delta))^2).
/// Throws std::domain_error for |delta| >= pi/2.
double center_speed_exact(double v, double delta, const PhysicalParams& phys);

/// Second-order approximation v_c = v * (1 + (l_r/L)^2 * delta^2).
double center_speed_taylor(double v, double delta, const PhysicalParams& phys);

/// Exact kinematic bicycle model with first-order speed lag:
///   xdot   = v_c(v, delta) * cos(psi + beta)
///   ydot   = v_c(v, delta) * sin(psi + beta)
///   psidot = v * tan(delta) / L
///   vdot   = -v/T_v + (K_v/T_v) * v_in(m, u)
/// with delta from the steering map and v_in = max_input_speed * m *
/// (u / nominal voltage).
StateDerivative physical_derivative(const VehicleState& state,
                                    const ControlInput& input,
                                    const PhysicalParams& phys);

/// Grey-box model derivative; see ModelParams. sign(0)*|0|^p8 is defined
/// as 0, so m = 0 produces no drive term. Inline because the rollout
/// kernels mirror this exact arithmetic sequence and the scalar backend
/// calls it directly.
inline StateDerivative parameterized_derivative(const VehicleState& state,
                                                const ControlInput& input,
                                                const ModelParams& p) {
  const double m = clamp_command(input.m);
  const double d = clamp_command(input.d);
  const double s = d + p.p9;
  const double lateral = 1.0 + p.p2 * (s * s);
  const double speed = p.p1 * state.v * lateral;
  const double heading = state.psi + p.p3 * s + p.p10;
  double motor = 0.0;
  if (m > 0.0) {
    motor = std::pow(m, p.p8);
  } else if (m < 0.0) {
    motor = -std::pow(-m, p.p8);
  }
  StateDerivative out;
  out.dx = speed * std::cos(heading);
  out.dy = speed * std::sin(heading);
  out.dpsi = p.p4 * state.v * s;
  out.dv = p.p5 * state.v + (p.p6 + p.p7 * input.u) * motor;
  return out;
}

/// One explicit-Euler step x + dt * f. Throws IntegrationError if the result
/// is not finite.
VehicleState euler_step(const VehicleState& state, const StateDerivative& f,
                        double dt);
VehicleState euler_step(const VehicleState& state, const ControlInput& input,
                        const ModelParams& p, double dt);
VehicleState euler_step(const VehicleState& state, const ControlInput& input,
                        const PhysicalParams& phys, double dt);

/// Iterated Euler integration. Output has inputs.size() + 1 states and
/// starts with `initial`.
std::vector<VehicleState> simulate(const VehicleState& initial,
                                   std::span<const ControlInput> inputs,
                                   const ModelParams& p, double dt);
std::vector<VehicleState> simulate(const VehicleState& initial,
                                   std::span<const ControlInput> inputs,
                                   const PhysicalParams& phys, double dt);

/// Small-angle grey-box equivalent of a physical parameter set, expressed in
/// steering-command units. Used as the default controller model for a
/// simulated vehicle.
ModelParams grey_box_equivalent(const PhysicalParams& phys);

}  // namespace minifleet

#endif  // MINIFLEET_DYNAMICS_HPP_
