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

#ifndef MINIFLEET_KERNELS_ROLLOUT_IMPL_HPP_
#define MINIFLEET_KERNELS_ROLLOUT_IMPL_HPP_

#include "minifleet/kernels/rollout.hpp"

namespace minifleet::kernels::detail {

void rollout_scalar(RolloutBatch& batch);
// Defined (and only callable) when the binary targets x86-64; guarded by the
// runtime dispatch in rollout().
void rollout_avx2(RolloutBatch& batch);

}  // namespace minifleet::kernels::detail

#endif  // MINIFLEET_KERNELS_ROLLOUT_IMPL_HPP_
