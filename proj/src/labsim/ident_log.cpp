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

#include "minifleet/labsim/ident_log.hpp"

#include <cmath>
#include <stdexcept>

#include "minifleet/labsim/rng.hpp"

namespace minifleet::labsim {

namespace {

double hashed_unit(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::uint64_t state = seed ^ (0x9e3779b97f4a7c15ull * (a + 1));
  splitmix64(state);
  state ^= 0xbf58476d1ce4e5b9ull * (b + 1);
  const std::uint64_t bits = splitmix64(state);
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

double phase(std::uint64_t seed, std::uint64_t index) {
  return 2.0 * M_PI * hashed_unit(seed, 1000 + index, 7);
}

}  // namespace

ControlInput excitation_input(const std::string& profile, double t,
                              std::uint64_t seed) {
  ControlInput input;
  if (profile == "random-chirp") {
    // Band-limited steering sweep, staircase motor levels, drifting voltage.
    input.d = 0.5 * std::sin(2.0 * M_PI * 0.23 * t + phase(seed, 0)) +
              0.3 * std::sin(2.0 * M_PI * 0.071 * t + phase(seed, 1)) +
              0.15 * std::sin(2.0 * M_PI * 0.53 * t + phase(seed, 2));
    const std::uint64_t block = static_cast<std::uint64_t>(t / 2.5);
    input.m = 0.12 + 0.63 * hashed_unit(seed, 17, block);
    input.u = 7.5 + 0.55 * std::sin(2.0 * M_PI * t / 31.0 + phase(seed, 3)) +
              0.2 * std::sin(2.0 * M_PI * t / 7.3 + phase(seed, 4));
    return input;
  }
  if (profile == "figure-eight") {
    input.d = 0.85 * std::sin(2.0 * M_PI * t / 8.0);
    static constexpr double kLevels[4] = {0.2, 0.35, 0.5, 0.3};
    input.m = kLevels[static_cast<int>(t / 4.0) % 4];
    input.u = 7.5 + 0.45 * std::sin(2.0 * M_PI * t / 23.0) +
              0.15 * std::sin(2.0 * M_PI * t / 5.9);
    return input;
  }
  throw std::invalid_argument("unknown excitation profile '" + profile + "'");
}

std::vector<ident::MeasurementSample> generate_ident_log(
    const ModelParams& true_params, const IdentLogOptions& options) {
  if (!(options.duration > 0.0) || !(options.dt > 0.0)) {
    throw std::invalid_argument("duration and dt must be positive");
  }
  const int rows = static_cast<int>(std::lround(options.duration / options.dt));
  const int lead =
      std::max(options.delays.ips_delay, options.delays.local_delay);
  const int total = rows + lead;

  // Commands as logged (at command time) and the truth they produce once the
  // actuation delay is applied.
  std::vector<ControlInput> commands;
  commands.reserve(total);
  for (int k = 0; k < total; ++k) {
    commands.push_back(
        excitation_input(options.profile, k * options.dt, options.seed));
  }
  std::vector<VehicleState> truth;
  truth.reserve(total);
  truth.push_back(options.initial);
  for (int k = 0; k + 1 < total; ++k) {
    const ControlInput effective =
        k >= options.delays.actuation_delay
            ? commands[k - options.delays.actuation_delay]
            : ControlInput{0.0, 0.0, kNominalVoltage};
    truth.push_back(
        euler_step(truth.back(), effective, true_params, options.dt));
  }

  RngStream noise = RngStream::keyed(options.seed, "identlog", 0, 0);
  std::vector<ident::MeasurementSample> log;
  log.reserve(rows);
  for (int k = lead; k < total; ++k) {
    const VehicleState& pose_truth = truth[k - options.delays.ips_delay];
    const VehicleState& speed_truth = truth[k - options.delays.local_delay];
    ident::MeasurementSample sample;
    sample.t = k * options.dt;
    const double nx = noise.normal(1.0);
    const double ny = noise.normal(1.0);
    const double npsi = noise.normal(1.0);
    const double nv = noise.normal(1.0);
    sample.x_ips = pose_truth.x + options.noise_pos_sigma * nx;
    sample.y_ips = pose_truth.y + options.noise_pos_sigma * ny;
    sample.psi_ips = pose_truth.psi + options.noise_yaw_sigma * npsi;
    sample.v_odo = speed_truth.v + options.noise_speed_sigma * nv;
    sample.m = commands[k].m;
    sample.d = commands[k].d;
    sample.u = commands[k].u;
    log.push_back(sample);
  }
  return log;
}

}  // namespace minifleet::labsim
