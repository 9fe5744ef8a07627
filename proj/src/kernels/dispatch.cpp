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

#include <cstddef>
#include <stdexcept>

#include "minifleet/kernels/rollout_impl.hpp"

namespace minifleet::kernels {

bool avx2_supported() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

Backend resolve(Backend requested) {
  switch (requested) {
    case Backend::kAuto:
      return avx2_supported() ? Backend::kAvx2 : Backend::kScalar;
    case Backend::kAvx2:
      return avx2_supported() ? Backend::kAvx2 : Backend::kScalar;
    case Backend::kScalar:
      return Backend::kScalar;
  }
  return Backend::kScalar;
}

std::string_view backend_name(Backend backend) {
  switch (backend) {
    case Backend::kAuto:
      return "auto";
    case Backend::kScalar:
      return "scalar";
    case Backend::kAvx2:
      return "avx2";
  }
  return "unknown";
}

void RolloutBatch::resize(int n_steps) {
  steps = n_steps;
  const std::size_t n = static_cast<std::size_t>(n_steps) * kLaneCount;
  motor.assign(n, 0.0);
  steer.assign(n, 0.0);
  voltage.assign(n, kNominalVoltage);
  out_x.assign(n, 0.0);
  out_y.assign(n, 0.0);
  out_psi.assign(n, 0.0);
  out_v.assign(n, 0.0);
}

void RolloutBatch::set_initial(int lane, const VehicleState& state) {
  x0[lane] = state.x;
  y0[lane] = state.y;
  psi0[lane] = state.psi;
  v0[lane] = state.v;
}

void RolloutBatch::set_params(int lane, const ModelParams& p) {
  const std::array<double, 10> values = p.to_array();
  for (int i = 0; i < 10; ++i) params[i][lane] = values[i];
}

void RolloutBatch::set_input(int step, int lane, const ControlInput& input) {
  const int idx = step * kLaneCount + lane;
  motor[idx] = input.m;
  steer[idx] = input.d;
  voltage[idx] = input.u;
}

void rollout(RolloutBatch& batch, Backend backend) {
  const std::size_t n = static_cast<std::size_t>(batch.steps) * kLaneCount;
  if (batch.motor.size() != n || batch.steer.size() != n ||
      batch.voltage.size() != n || batch.out_x.size() != n ||
      batch.out_y.size() != n || batch.out_psi.size() != n ||
      batch.out_v.size() != n) {
    throw std::invalid_argument("rollout batch arrays not sized to steps");
  }
  switch (resolve(backend)) {
    case Backend::kAvx2:
      detail::rollout_avx2(batch);
      return;
    case Backend::kScalar:
    case Backend::kAuto:
      detail::rollout_scalar(batch);
      return;
  }
}

}  // namespace minifleet::kernels
