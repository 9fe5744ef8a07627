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

#ifndef MINIFLEET_KERNELS_ROLLOUT_HPP_
#define MINIFLEET_KERNELS_ROLLOUT_HPP_

#include <array>
#include <string_view>
#include <vector>

#include "minifleet/dynamics.hpp"

// Batched rollout of the grey-box model: kLaneCount independent trajectories
// advance in lock step, each lane with its own parameter vector, initial
// state and input sequence. This is the inner loop of both the
// identification Jacobian (lanes = parameter perturbations) and the MPC
// gradient (lanes = input perturbations).
//
// Backend contract: every backend produces bit-identical output. The AVX2
// variant vectorizes the plain arithmetic but routes sin/cos/pow through
// libm one lane at a time, and the project builds with -ffp-contract=off,
// so each lane performs exactly the operation sequence of
// minifleet::parameterized_derivative plus the Euler update.

namespace minifleet::kernels {

inline constexpr int kLaneCount = 4;

enum class Backend {
  kAuto,    // pick the best supported backend at runtime
  kScalar,  // reference implementation
  kAvx2,    // x86-64 AVX2
};

/// Maps kAuto to a concrete supported backend; explicit requests are
/// returned unchanged (kAvx2 on a non-AVX2 host falls back to kScalar).
Backend resolve(Backend requested);
bool avx2_supported();
std::string_view backend_name(Backend backend);

/// Lane-interleaved rollout request and output. Element (step k, lane l) of
/// a per-step array lives at index k * kLaneCount + l.
struct RolloutBatch {
  int steps{0};
  double dt{kDefaultTimestep};

  std::array<double, kLaneCount> x0{};
  std::array<double, kLaneCount> y0{};
  std::array<double, kLaneCount> psi0{};
  std::array<double, kLaneCount> v0{};
  // params[i][lane] holds p_{i+1} for that lane.
  std::array<std::array<double, kLaneCount>, 10> params{};

  std::vector<double> motor;    // size steps * kLaneCount
  std::vector<double> steer;    // size steps * kLaneCount
  std::vector<double> voltage;  // size steps * kLaneCount

  // State after step k, for k = 0..steps-1.
  std::vector<double> out_x;
  std::vector<double> out_y;
  std::vector<double> out_psi;
  std::vector<double> out_v;

  void resize(int n_steps);
  void set_initial(int lane, const VehicleState& state);
  void set_params(int lane, const ModelParams& p);
  void set_input(int step, int lane, const ControlInput& input);

  VehicleState state_after(int step, int lane) const {
    const int idx = step * kLaneCount + lane;
    return {out_x[idx], out_y[idx], out_psi[idx], out_v[idx]};
  }
};

/// Runs the batch in place. Non-finite lanes are not an error here; callers
/// inspect the outputs (identification maps them to its penalty sentinel).
void rollout(RolloutBatch& batch, Backend backend = Backend::kAuto);

}  // namespace minifleet::kernels

#endif  // MINIFLEET_KERNELS_ROLLOUT_HPP_
