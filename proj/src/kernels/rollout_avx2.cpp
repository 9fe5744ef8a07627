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

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>

namespace minifleet::kernels::detail {

// Mirrors parameterized_derivative + the Euler update operation for
// operation. No FMA: mul/add pairs keep each lane bit-identical to the
// scalar backend. sin/cos/pow are extracted per lane so transcendentals go
// through the same libm calls in both backends.
void rollout_avx2(RolloutBatch& batch) {
  const __m256d dt = _mm256_set1_pd(batch.dt);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d neg_one = _mm256_set1_pd(-1.0);

  __m256d x = _mm256_loadu_pd(batch.x0.data());
  __m256d y = _mm256_loadu_pd(batch.y0.data());
  __m256d psi = _mm256_loadu_pd(batch.psi0.data());
  __m256d v = _mm256_loadu_pd(batch.v0.data());

  const __m256d p1 = _mm256_loadu_pd(batch.params[0].data());
  const __m256d p2 = _mm256_loadu_pd(batch.params[1].data());
  const __m256d p3 = _mm256_loadu_pd(batch.params[2].data());
  const __m256d p4 = _mm256_loadu_pd(batch.params[3].data());
  const __m256d p5 = _mm256_loadu_pd(batch.params[4].data());
  const __m256d p6 = _mm256_loadu_pd(batch.params[5].data());
  const __m256d p7 = _mm256_loadu_pd(batch.params[6].data());
  const __m256d p9 = _mm256_loadu_pd(batch.params[8].data());
  const __m256d p10 = _mm256_loadu_pd(batch.params[9].data());
  const std::array<double, kLaneCount>& p8 = batch.params[7];

  alignas(32) double heading_buf[kLaneCount];
  alignas(32) double cos_buf[kLaneCount];
  alignas(32) double sin_buf[kLaneCount];
  alignas(32) double motor_buf[kLaneCount];
  alignas(32) double drive_buf[kLaneCount];

  for (int k = 0; k < batch.steps; ++k) {
    const int row = k * kLaneCount;
    __m256d m = _mm256_loadu_pd(&batch.motor[row]);
    m = _mm256_min_pd(_mm256_max_pd(m, neg_one), one);
    __m256d d = _mm256_loadu_pd(&batch.steer[row]);
    d = _mm256_min_pd(_mm256_max_pd(d, neg_one), one);
    const __m256d u = _mm256_loadu_pd(&batch.voltage[row]);

    const __m256d s = _mm256_add_pd(d, p9);
    const __m256d lateral =
        _mm256_add_pd(one, _mm256_mul_pd(p2, _mm256_mul_pd(s, s)));
    const __m256d speed = _mm256_mul_pd(_mm256_mul_pd(p1, v), lateral);
    const __m256d heading =
        _mm256_add_pd(_mm256_add_pd(psi, _mm256_mul_pd(p3, s)), p10);

    _mm256_store_pd(heading_buf, heading);
    _mm256_store_pd(motor_buf, m);
    for (int lane = 0; lane < kLaneCount; ++lane) {
      cos_buf[lane] = std::cos(heading_buf[lane]);
      sin_buf[lane] = std::sin(heading_buf[lane]);
      const double ml = motor_buf[lane];
      if (ml > 0.0) {
        drive_buf[lane] = std::pow(ml, p8[lane]);
      } else if (ml < 0.0) {
        drive_buf[lane] = -std::pow(-ml, p8[lane]);
      } else {
        drive_buf[lane] = 0.0;
      }
    }

    const __m256d dx = _mm256_mul_pd(speed, _mm256_load_pd(cos_buf));
    const __m256d dy = _mm256_mul_pd(speed, _mm256_load_pd(sin_buf));
    const __m256d dpsi = _mm256_mul_pd(_mm256_mul_pd(p4, v), s);
    const __m256d gain = _mm256_add_pd(p6, _mm256_mul_pd(p7, u));
    const __m256d dv = _mm256_add_pd(
        _mm256_mul_pd(p5, v), _mm256_mul_pd(gain, _mm256_load_pd(drive_buf)));

    x = _mm256_add_pd(x, _mm256_mul_pd(dt, dx));
    y = _mm256_add_pd(y, _mm256_mul_pd(dt, dy));
    psi = _mm256_add_pd(psi, _mm256_mul_pd(dt, dpsi));
    v = _mm256_add_pd(v, _mm256_mul_pd(dt, dv));

    _mm256_storeu_pd(&batch.out_x[row], x);
    _mm256_storeu_pd(&batch.out_y[row], y);
    _mm256_storeu_pd(&batch.out_psi[row], psi);
    _mm256_storeu_pd(&batch.out_v[row], v);
  }
}

}  // namespace minifleet::kernels::detail

#else  // !x86-64

namespace minifleet::kernels::detail {

void rollout_avx2(RolloutBatch& batch) { rollout_scalar(batch); }

}  // namespace minifleet::kernels::detail

#endif
