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

#include "minifleet/kernels/rollout_impl.hpp"

namespace minifleet::kernels::detail {

void rollout_scalar(RolloutBatch& batch) {
  const int steps = batch.steps;
  for (int lane = 0; lane < kLaneCount; ++lane) {
    VehicleState state{batch.x0[lane], batch.y0[lane], batch.psi0[lane],
                       batch.v0[lane]};
    std::array<double, 10> raw;
    for (int i = 0; i < 10; ++i) raw[i] = batch.params[i][lane];
    const ModelParams p = ModelParams::from_array(raw);
    for (int k = 0; k < steps; ++k) {
      const int idx = k * kLaneCount + lane;
      const ControlInput input{batch.motor[idx], batch.steer[idx],
                               batch.voltage[idx]};
      const StateDerivative f = parameterized_derivative(state, input, p);
      state.x = state.x + batch.dt * f.dx;
      state.y = state.y + batch.dt * f.dy;
      state.psi = state.psi + batch.dt * f.dpsi;
      state.v = state.v + batch.dt * f.dv;
      batch.out_x[idx] = state.x;
      batch.out_y[idx] = state.y;
      batch.out_psi[idx] = state.psi;
      batch.out_v[idx] = state.v;
    }
  }
}

}  // namespace minifleet::kernels::detail
