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

#ifndef MINIFLEET_LABSIM_IDENT_LOG_HPP_
#define MINIFLEET_LABSIM_IDENT_LOG_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "minifleet/ident/ident.hpp"

namespace minifleet::labsim {

/// Synthetic measurement-log generation: drives the grey-box model open loop
/// with a persistent excitation profile, injects the configured channel
/// delays and optional Gaussian noise, and emits rows in the ident log
/// format. With zero noise the log round-trips exactly: aligning it with the
/// true delays and simulating from any window's measured initial state
/// reproduces the measured states bit for bit.
struct IdentLogOptions {
  double duration{120.0};  // [s] of emitted rows
  double dt{kDefaultTimestep};
  std::string profile{"random-chirp"};  // or "figure-eight"
  ident::DelayConfig delays{1, 0, 5};
  double noise_pos_sigma{0.0};    // [m], per axis
  double noise_yaw_sigma{0.0};    // [rad]
  double noise_speed_sigma{0.0};  // [m/s]
  std::uint64_t seed{1};
  VehicleState initial{};
};

std::vector<ident::MeasurementSample> generate_ident_log(
    const ModelParams& true_params, const IdentLogOptions& options);

/// The excitation commands of a profile at time t (exposed for tests).
ControlInput excitation_input(const std::string& profile, double t,
                              std::uint64_t seed);

}  // namespace minifleet::labsim

#endif  // MINIFLEET_LABSIM_IDENT_LOG_HPP_
