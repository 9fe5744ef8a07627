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

#include <doctest.h>

#include "testing/oracles.hpp"

namespace minifleet {
namespace {

using testing::RandomCorpus;

// Values computed with an independent sweep/evaluation oracle and frozen.
constexpr double kMaxSteeringAngle = 0.4636476090008061;  // atan(0.15/0.3)
constexpr double kSideSlipAtMax = 0.24497866312686412;    // atan(0.5*tan(dmax))
constexpr double kCenterSpeedFactorAtMax = 1.0307764064044151;
// Envelope constants over |delta| <= dmax: |taylor - exact| <= C * delta^n.
constexpr double kSideSlipEnvelope = 0.1319842508393569;     // n = 3
constexpr double kCenterSpeedEnvelope = 0.12808133972628216;  // n = 2, per v

TEST_CASE("steering command maps linearly onto the steering angle") {
  const PhysicalParams phys = PhysicalParams::defaults();
  CHECK(steering_command_to_angle(0.0, phys) == 0.0);
  CHECK(steering_command_to_angle(1.0, phys) ==
        doctest::Approx(kMaxSteeringAngle).epsilon(1e-15));
  CHECK(steering_command_to_angle(-0.5, phys) ==
        doctest::Approx(-0.23182380450040305).epsilon(1e-15));
  // Out-of-range commands clamp.
  CHECK(steering_command_to_angle(1.7, phys) ==
        steering_command_to_angle(1.0, phys));
  CHECK(steering_command_to_angle(-3.0, phys) ==
        steering_command_to_angle(-1.0, phys));
}

TEST_CASE("side slip matches the kinematic relation") {
  const PhysicalParams phys = PhysicalParams::defaults();
  CHECK(side_slip_exact(0.0, phys) == 0.0);
  CHECK(side_slip_exact(kMaxSteeringAngle, phys) ==
        doctest::Approx(kSideSlipAtMax).epsilon(1e-15));
  CHECK_THROWS_AS(side_slip_exact(M_PI / 2.0, phys), std::domain_error);
  CHECK_THROWS_AS(side_slip_exact(-1.6, phys), std::domain_error);

  // Odd symmetry.
  for (double delta = 0.01; delta < 1.5; delta += 0.07) {
    CHECK(side_slip_exact(-delta, phys) ==
          doctest::Approx(-side_slip_exact(delta, phys)).epsilon(1e-15));
  }
}

TEST_CASE("side slip first-order form stays inside the cubic envelope") {
  const PhysicalParams phys = PhysicalParams::defaults();
  CHECK(side_slip_taylor(0.0, phys) == 0.0);
  CHECK(side_slip_taylor(0.1, phys) == doctest::Approx(0.05).epsilon(1e-15));
  for (int i = 1; i <= 2000; ++i) {
    const double delta = kMaxSteeringAngle * i / 2000.0;
    const double diff =
        std::abs(side_slip_taylor(delta, phys) - side_slip_exact(delta, phys));
    CHECK(diff <= kSideSlipEnvelope * delta * delta * delta * (1.0 + 1e-12));
  }
}

TEST_CASE("center speed matches the geometric relation") {
  const PhysicalParams phys = PhysicalParams::defaults();
  CHECK(center_speed_exact(1.3, 0.0, phys) == 1.3);
  CHECK(center_speed_exact(1.0, kMaxSteeringAngle, phys) ==
        doctest::Approx(kCenterSpeedFactorAtMax).epsilon(1e-15));
  CHECK(center_speed_exact(0.0, 0.3, phys) == 0.0);
  CHECK_THROWS_AS(center_speed_exact(1.0, M_PI / 2.0, phys),
                  std::domain_error);
}

TEST_CASE("center speed second-order form: value and quadratic envelope") {
  const PhysicalParams phys = PhysicalParams::defaults();
  CHECK(center_speed_taylor(1.0, 0.0, phys) == 1.0);
  CHECK(center_speed_taylor(1.0, 0.2, phys) ==
        doctest::Approx(1.01).epsilon(1e-15));
  // The polynomial form deviates from the exact factor at second order in
  // delta; the envelope constant comes from a dense sweep oracle.
  for (int i = 1; i <= 2000; ++i) {
    const double delta = kMaxSteeringAngle * i / 2000.0;
    for (double v : {0.3, 1.0, 3.7}) {
      const double diff = std::abs(center_speed_taylor(v, delta, phys) -
                                   center_speed_exact(v, delta, phys));
      CHECK(diff <= kCenterSpeedEnvelope * v * delta * delta * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("approximation dominance over the steering range") {
  const PhysicalParams phys = PhysicalParams::defaults();
  for (int i = 0; i <= 500; ++i) {
    const double delta = kMaxSteeringAngle * (2.0 * i / 500.0 - 1.0);
    for (double v : {0.0, 0.7, 3.7}) {
      const double exact = center_speed_exact(v, delta, phys);
      const double taylor = center_speed_taylor(v, delta, phys);
      CHECK(exact <= taylor * (1.0 + 1e-15));
      CHECK(taylor >= v);
      CHECK(exact >= v);
    }
  }
}

TEST_CASE("physical model: rest, straight line and turning radius") {
  const PhysicalParams phys = PhysicalParams::defaults();

  const StateDerivative rest =
      physical_derivative({0.5, -0.2, 1.0, 0.0}, {0.0, 0.3, 7.4}, phys);
  CHECK(rest.dx == 0.0);
  CHECK(rest.dy == 0.0);
  CHECK(rest.dpsi == 0.0);
  CHECK(rest.dv == 0.0);

  const StateDerivative straight =
      physical_derivative({0.0, 0.0, 0.0, 1.0}, {0.0, 0.0, 7.4}, phys);
  CHECK(straight.dx == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(straight.dy == 0.0);
  CHECK(straight.dpsi == 0.0);

  // Full steering at 1 m/s: yaw rate tan(dmax)/L, turn radius 0.3 m.
  const StateDerivative turning =
      physical_derivative({0.0, 0.0, 0.0, 1.0}, {0.0, 1.0, 7.4}, phys);
  CHECK(turning.dpsi == doctest::Approx(10.0 / 3.0).epsilon(1e-12));
  CHECK(1.0 / turning.dpsi == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("physical model is invariant under rotation") {
  const PhysicalParams phys = PhysicalParams::defaults();
  RandomCorpus corpus(41);
  for (int i = 0; i < 50; ++i) {
    const VehicleState s = corpus.state();
    const ControlInput u = corpus.input();
    const double angle = corpus.uniform(-M_PI, M_PI);
    const StateDerivative f = physical_derivative(s, u, phys);
    const VehicleState rotated{
        std::cos(angle) * s.x - std::sin(angle) * s.y,
        std::sin(angle) * s.x + std::cos(angle) * s.y, s.psi + angle, s.v};
    const StateDerivative g = physical_derivative(rotated, u, phys);
    CHECK(g.dx == doctest::Approx(std::cos(angle) * f.dx -
                                  std::sin(angle) * f.dy)
                      .epsilon(1e-12));
    CHECK(g.dy == doctest::Approx(std::sin(angle) * f.dx +
                                  std::cos(angle) * f.dy)
                      .epsilon(1e-12));
    CHECK(g.dpsi == doctest::Approx(f.dpsi).epsilon(1e-13));
    CHECK(g.dv == doctest::Approx(f.dv).epsilon(1e-13));
  }
}

TEST_CASE("grey-box derivative: reference calibration spot values") {
  const ModelParams p = ModelParams::reference_fit();

  // Yaw rate from the steering offset alone at v = 1, d = 0.
  const StateDerivative f =
      parameterized_derivative({0.0, 0.0, 0.0, 1.0}, {0.0, 0.0, 7.4}, p);
  CHECK(f.dpsi == doctest::Approx(0.1068).epsilon(1e-12));

  const StateDerivative rest =
      parameterized_derivative({1.0, 2.0, 0.5, 0.0}, {0.0, 0.0, 7.4}, p);
  CHECK(rest.dx == 0.0);
  CHECK(rest.dy == 0.0);
  CHECK(rest.dpsi == 0.0);
  CHECK(rest.dv == 0.0);

  // Steady-state speed at full motor, nominal voltage solves
  // 0 = p5 v + (p6 + p7 u); loosely consistent with the 3.7 m/s top speed.
  const double v_ss = -(p.p6 + p.p7 * 7.4) / p.p5;
  CHECK(v_ss == doctest::Approx(4.072146118721461).epsilon(1e-15));
  const StateDerivative at_ss =
      parameterized_derivative({0.0, 0.0, 0.0, v_ss}, {1.0, 0.0, 7.4}, p);
  CHECK(at_ss.dv == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("grey-box motor term is continuous and odd at m = 0") {
  const ModelParams p = ModelParams::reference_fit();
  const VehicleState s{0.0, 0.0, 0.0, 1.0};
  const StateDerivative at_zero = parameterized_derivative(s, {0.0, 0.0, 7.4}, p);
  const StateDerivative plus =
      parameterized_derivative(s, {1e-12, 0.0, 7.4}, p);
  const StateDerivative minus =
      parameterized_derivative(s, {-1e-12, 0.0, 7.4}, p);
  CHECK(std::isfinite(at_zero.dv));
  CHECK(std::abs(plus.dv - at_zero.dv) < 1e-9);
  CHECK(std::abs(minus.dv - at_zero.dv) < 1e-9);
}

TEST_CASE("grey-box mirror symmetry with zero offsets") {
  ModelParams p = ModelParams::reference_fit();
  p.p9 = 0.0;
  p.p10 = 0.0;
  RandomCorpus corpus(7);
  for (int i = 0; i < 50; ++i) {
    VehicleState s = corpus.state();
    ControlInput u = corpus.input();
    const StateDerivative f = parameterized_derivative(s, u, p);
    VehicleState mirrored = s;
    mirrored.psi = -s.psi;
    mirrored.y = -s.y;
    ControlInput mu = u;
    mu.d = -u.d;
    const StateDerivative g = parameterized_derivative(mirrored, mu, p);
    CHECK(g.dx == doctest::Approx(f.dx).epsilon(1e-13));
    CHECK(g.dy == doctest::Approx(-f.dy).epsilon(1e-13));
    CHECK(g.dpsi == doctest::Approx(-f.dpsi).epsilon(1e-13));
    CHECK(g.dv == doctest::Approx(f.dv).epsilon(1e-13));
  }
}

TEST_CASE("euler step: identity, advance and local error envelope") {
  const ModelParams p = ModelParams::reference_fit();

  const VehicleState rest{1.0, 1.0, 0.3, 0.0};
  const VehicleState still = euler_step(rest, {0.0, 0.0, 7.4}, p, 0.02);
  CHECK(still.x == rest.x);
  CHECK(still.y == rest.y);
  CHECK(still.psi == rest.psi);
  CHECK(still.v == rest.v);

  ModelParams straight;  // p9 = p10 = 0 defaults, unit gain
  const VehicleState moved =
      euler_step({0.0, 0.0, 0.0, 1.0}, {0.0, 0.0, 7.4}, straight, 0.02);
  CHECK(moved.x == doctest::Approx(0.02).epsilon(1e-15));
  CHECK(moved.y == 0.0);

  CHECK_THROWS_AS(
      euler_step({0.0, 0.0, 0.0, 1e308}, {1.0, 0.0, 7.4},
                 ModelParams{1, 0, 0.5, 3, 1e308, 0, 1, 1, 0, 0}, 0.02),
      IntegrationError);

  // One step vs two half steps differ at second order: calibrate the
  // envelope constant on a sweep, then check it scales as dt^2.
  RandomCorpus corpus(11);
  std::vector<VehicleState> states;
  std::vector<ControlInput> inputs;
  for (int i = 0; i < 200; ++i) {
    states.push_back(corpus.state());
    inputs.push_back(corpus.input());
  }
  auto richardson_gap = [&](const VehicleState& s, const ControlInput& u,
                            double dt) {
    const VehicleState one = euler_step(s, u, p, dt);
    const VehicleState two =
        euler_step(euler_step(s, u, p, dt / 2.0), u, p, dt / 2.0);
    return testing::state_distance(one, two);
  };
  double envelope = 0.0;
  for (int i = 0; i < 200; ++i) {
    envelope = std::max(envelope, richardson_gap(states[i], inputs[i], 0.02) /
                                      (0.02 * 0.02));
  }
  CHECK(envelope > 0.0);
  for (int i = 0; i < 200; ++i) {
    CHECK(richardson_gap(states[i], inputs[i], 0.01) <=
          envelope * 0.01 * 0.01 * 1.05);
  }
}

TEST_CASE("simulate: length, composition and speed settling") {
  const ModelParams p = ModelParams::reference_fit();
  RandomCorpus corpus(13);

  const std::vector<ControlInput> zeros(50, {0.0, 0.0, 7.4});
  const auto constant = simulate({0.4, 0.2, 0.1, 0.0}, zeros, p, 0.02);
  CHECK(constant.size() == 51);
  for (const VehicleState& s : constant) {
    CHECK(s.x == constant.front().x);
    CHECK(s.v == 0.0);
  }

  const std::vector<ControlInput> inputs = corpus.inputs(120);
  const auto full = simulate({0, 0, 0, 0.5}, inputs, p, 0.02);
  const auto head = simulate(
      {0, 0, 0, 0.5}, std::span(inputs).subspan(0, 70), p, 0.02);
  const auto tail =
      simulate(head.back(), std::span(inputs).subspan(70), p, 0.02);
  CHECK(full.size() == 121);
  CHECK(tail.back().x == full.back().x);
  CHECK(tail.back().y == full.back().y);
  CHECK(tail.back().psi == full.back().psi);
  CHECK(tail.back().v == full.back().v);

  // Constant command settles to the steady state within 5 time constants of
  // the linear speed dynamics (analytic first-order response oracle).
  const double m = 0.6;
  const double u = 7.4;
  const double v_ss = -(p.p6 + p.p7 * u) * std::pow(m, p.p8) / p.p5;
  const double t_eff = -1.0 / p.p5;
  const int settle_steps = static_cast<int>(std::ceil(5.0 * t_eff / 0.02));
  const std::vector<ControlInput> constant_m(settle_steps, {m, 0.0, u});
  const auto settled = simulate({0, 0, 0, 0}, constant_m, p, 0.02);
  CHECK(std::abs(settled.back().v - v_ss) <= 0.01 * v_ss);
}

TEST_CASE("grey-box equivalent of the physical defaults") {
  const PhysicalParams phys = PhysicalParams::defaults();
  const ModelParams p = grey_box_equivalent(phys);
  // Yaw-rate gain: delta_max / L in command units.
  CHECK(p.p4 == doctest::Approx(phys.max_steering_angle / phys.wheelbase)
                    .epsilon(1e-15));
  CHECK(p.p5 == doctest::Approx(-2.19).epsilon(1e-12));
  // Same steady-state speed as the physical model at nominal voltage.
  const double v_ss_grey = -(p.p6 + p.p7 * kNominalVoltage) / p.p5;
  const double v_ss_phys = phys.speed_gain * phys.max_input_speed;
  CHECK(v_ss_grey == doctest::Approx(v_ss_phys).epsilon(1e-12));
}

}  // namespace
}  // namespace minifleet
