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

#ifndef MINIFLEET_TESTS_TESTING_ORACLES_HPP_
#define MINIFLEET_TESTS_TESTING_ORACLES_HPP_

#include <cmath>
#include <random>
#include <span>
#include <vector>

#include "minifleet/dynamics.hpp"

// Test-only reference implementations, independent of the library's
// integration and rollout paths.

namespace minifleet::testing {

/// Classic RK4 on the grey-box model; reference integrator for order checks.
inline VehicleState rk4_step(const VehicleState& state,
                             const ControlInput& input, const ModelParams& p,
                             double dt) {
  auto add = [](const VehicleState& s, const StateDerivative& f,
                double scale) {
    return VehicleState{s.x + scale * f.dx, s.y + scale * f.dy,
                        s.psi + scale * f.dpsi, s.v + scale * f.dv};
  };
  const StateDerivative k1 = parameterized_derivative(state, input, p);
  const StateDerivative k2 =
      parameterized_derivative(add(state, k1, dt / 2.0), input, p);
  const StateDerivative k3 =
      parameterized_derivative(add(state, k2, dt / 2.0), input, p);
  const StateDerivative k4 =
      parameterized_derivative(add(state, k3, dt), input, p);
  VehicleState out;
  out.x = state.x + dt / 6.0 * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
  out.y = state.y + dt / 6.0 * (k1.dy + 2.0 * k2.dy + 2.0 * k3.dy + k4.dy);
  out.psi =
      state.psi + dt / 6.0 * (k1.dpsi + 2.0 * k2.dpsi + 2.0 * k3.dpsi + k4.dpsi);
  out.v = state.v + dt / 6.0 * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv);
  return out;
}

inline VehicleState rk4_rollout(VehicleState state,
                                std::span<const ControlInput> inputs,
                                const ModelParams& p, double dt,
                                int substeps) {
  for (const ControlInput& input : inputs) {
    for (int s = 0; s < substeps; ++s) {
      state = rk4_step(state, input, p, dt / substeps);
    }
  }
  return state;
}

inline double state_distance(const VehicleState& a, const VehicleState& b) {
  const double dyaw = std::remainder(a.psi - b.psi, 2.0 * M_PI);
  return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) +
                   dyaw * dyaw + (a.v - b.v) * (a.v - b.v));
}

/// Algebraic (Kasa) least-squares circle fit.
struct CircleFit {
  double cx, cy, radius;
};
inline CircleFit fit_circle(std::span<const double> xs,
                            std::span<const double> ys) {
  // Solve [x y 1] * [2a 2b c]^T = x^2 + y^2 in least squares via normal
  // equations (3x3, Cramer).
  double sxx = 0, sxy = 0, sx = 0, syy = 0, sy = 0, n = 0;
  double rx = 0, ry = 0, r1 = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x = xs[i], y = ys[i];
    const double z = x * x + y * y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
    sx += x;
    sy += y;
    n += 1.0;
    rx += x * z;
    ry += y * z;
    r1 += z;
  }
  const double a[3][3] = {{sxx, sxy, sx}, {sxy, syy, sy}, {sx, sy, n}};
  const double b[3] = {rx, ry, r1};
  const double det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                     a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                     a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  auto det3 = [&](int col) {
    double m[3][3];
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) m[r][c] = c == col ? b[r] : a[r][c];
    }
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  };
  const double p0 = det3(0) / det;
  const double p1 = det3(1) / det;
  const double p2 = det3(2) / det;
  CircleFit fit;
  fit.cx = p0 / 2.0;
  fit.cy = p1 / 2.0;
  fit.radius = std::sqrt(p2 + fit.cx * fit.cx + fit.cy * fit.cy);
  return fit;
}

/// Deterministic random states/inputs for property tests.
class RandomCorpus {
 public:
  explicit RandomCorpus(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  VehicleState state() {
    return {uniform(-2.0, 2.0), uniform(-2.0, 2.0), uniform(-M_PI, M_PI),
            uniform(0.0, 2.5)};
  }
  ControlInput input() {
    return {uniform(-0.8, 0.8), uniform(-1.0, 1.0), uniform(6.5, 8.3)};
  }
  std::vector<ControlInput> inputs(int n) {
    std::vector<ControlInput> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) out.push_back(input());
    return out;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace minifleet::testing

#endif  // MINIFLEET_TESTS_TESTING_ORACLES_HPP_
