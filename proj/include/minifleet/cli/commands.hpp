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

#ifndef MINIFLEET_CLI_COMMANDS_HPP_
#define MINIFLEET_CLI_COMMANDS_HPP_

#include <filesystem>
#include <optional>
#include <string>

#include "minifleet/ident/estimate.hpp"

namespace minifleet::cli {

// Stable exit-code contract.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitInsufficientData = 3;
inline constexpr int kExitRuntimeError = 4;

struct SimulateOptions {
  std::filesystem::path scenario_path;
  std::filesystem::path lab_config_path;  // empty: defaults
  std::filesystem::path out_dir{"out"};
  std::optional<std::uint64_t> seed;  // overrides the lab config seed
};

struct IdentifyOptions {
  std::filesystem::path log_path;
  std::filesystem::path out_path;  // empty: no report file
  int window{100};
  ident::DelayRanges grid{};
  ident::InitMode init_mode{ident::InitMode::kMeasured};
  ident::ErrorWeights weights{};
};

struct FollowOptions {
  std::filesystem::path scenario_path;
  std::filesystem::path params_path;  // empty: scenario defaults
  std::string controller;             // "mpc" | "pid" | "" (keep scenario)
  std::filesystem::path lab_config_path;
  std::filesystem::path out_dir{"out"};
  std::optional<std::uint64_t> seed;
};

struct EvalModelOptions {
  std::filesystem::path log_path;
  std::filesystem::path params_path;
  std::filesystem::path out_path{"eval.json"};
  std::optional<ident::DelayConfig> delays;  // default: from params file or 0
  int window{100};
};

struct GenLogOptions {
  std::filesystem::path out_path{"log.csv"};
  std::filesystem::path params_path;  // empty: stock calibration
  double duration{120.0};
  std::string profile{"random-chirp"};
  ident::DelayConfig delays{1, 0, 5};
  double noise_pos{0.0};
  double noise_yaw{0.0};
  double noise_speed{0.0};
  std::uint64_t seed{1};
};

int run_simulate(const SimulateOptions& options);
int run_identify(const IdentifyOptions& options);
int run_follow(const FollowOptions& options);
int run_eval_model(const EvalModelOptions& options);
int run_gen_log(const GenLogOptions& options);

/// Parses "ips=0..3,local=0..2,act=0..8" (any subset of the three keys).
ident::DelayRanges parse_grid_spec(const std::string& text);

}  // namespace minifleet::cli

#endif  // MINIFLEET_CLI_COMMANDS_HPP_
