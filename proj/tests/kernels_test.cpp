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

#include "minifleet/kernels/rollout.hpp"

#include <doctest.h>

#include "testing/oracles.hpp"

namespace minifleet::kernels {
namespace {

RolloutBatch random_batch(std::uint64_t seed, int steps) {
  testing::RandomCorpus corpus(seed);
  RolloutBatch batch;
  batch.dt = kDefaultTimestep;
  batch.resize(steps);
  for (int lane = 0; lane < kLaneCount; ++lane) {
    batch.set_initial(lane, corpus.state());
    ModelParams p = ModelParams::reference_fit();
    p.p2 += corpus.uniform(-0.05, 0.05);
    p.p4 += corpus.uniform(-0.5, 0.5);
    p.p5 += corpus.uniform(-0.3, 0.3);
    p.p8 += corpus.uniform(-0.2, 0.2);
    p.p9 += corpus.uniform(-0.02, 0.02);
    batch.set_params(lane, p);
    for (int k = 0; k < steps; ++k) {
      batch.set_input(k, lane, corpus.input());
    }
  }
  return batch;
}

bool bitwise_equal(const RolloutBatch& a, const RolloutBatch& b) {
  return a.out_x == b.out_x && a.out_y == b.out_y && a.out_psi == b.out_psi &&
         a.out_v == b.out_v;
}

TEST_CASE("backend resolution") {
  CHECK(resolve(Backend::kScalar) == Backend::kScalar);
  const Backend automatic = resolve(Backend::kAuto);
  CHECK((automatic == Backend::kScalar || automatic == Backend::kAvx2));
  if (!avx2_supported()) {
    CHECK(resolve(Backend::kAvx2) == Backend::kScalar);
  } else {
    CHECK(resolve(Backend::kAvx2) == Backend::kAvx2);
  }
  CHECK(backend_name(Backend::kScalar) == "scalar");
  CHECK(backend_name(Backend::kAvx2) == "avx2");
}

TEST_CASE("scalar backend lanes reproduce the module-level simulation") {
  RolloutBatch batch = random_batch(101, 160);
  const RolloutBatch reference = batch;
  rollout(batch, Backend::kScalar);
  for (int lane = 0; lane < kLaneCount; ++lane) {
    std::array<double, 10> raw;
    for (int i = 0; i < 10; ++i) raw[i] = reference.params[i][lane];
    const ModelParams p = ModelParams::from_array(raw);
    VehicleState state{reference.x0[lane], reference.y0[lane],
                       reference.psi0[lane], reference.v0[lane]};
    std::vector<ControlInput> inputs;
    for (int k = 0; k < reference.steps; ++k) {
      const int idx = k * kLaneCount + lane;
      inputs.push_back({reference.motor[idx], reference.steer[idx],
                        reference.voltage[idx]});
    }
    const auto states = simulate(state, inputs, p, reference.dt);
    for (int k = 0; k < reference.steps; ++k) {
      const VehicleState out = batch.state_after(k, lane);
      CHECK(out.x == states[k + 1].x);
      CHECK(out.y == states[k + 1].y);
      CHECK(out.psi == states[k + 1].psi);
      CHECK(out.v == states[k + 1].v);
    }
  }
}

TEST_CASE("avx2 backend is bit-identical to the scalar backend") {
  if (!avx2_supported()) {
    MESSAGE("AVX2 not available on this host; dispatch falls back to scalar");
    return;
  }
  for (std::uint64_t seed : {1ull, 2ull, 3ull, 17ull, 99ull}) {
    RolloutBatch scalar_batch = random_batch(seed, 200);
    RolloutBatch avx_batch = scalar_batch;
    rollout(scalar_batch, Backend::kScalar);
    rollout(avx_batch, Backend::kAvx2);
    CHECK(bitwise_equal(scalar_batch, avx_batch));
  }
}

TEST_CASE("avx2 backend clamps out-of-range commands like the scalar one") {
  if (!avx2_supported()) return;
  RolloutBatch batch = random_batch(7, 50);
  for (int k = 0; k < batch.steps; ++k) {
    for (int lane = 0; lane < kLaneCount; ++lane) {
      const int idx = k * kLaneCount + lane;
      batch.motor[idx] *= 3.0;  // beyond [-1, 1]
      batch.steer[idx] *= 2.5;
    }
  }
  RolloutBatch avx_batch = batch;
  rollout(batch, Backend::kScalar);
  rollout(avx_batch, Backend::kAvx2);
  CHECK(bitwise_equal(batch, avx_batch));
}

TEST_CASE("batch size validation") {
  RolloutBatch batch;
  batch.steps = 4;  // arrays not resized
  CHECK_THROWS_AS(rollout(batch, Backend::kScalar), std::invalid_argument);
}

}  // namespace
}  // namespace minifleet::kernels
