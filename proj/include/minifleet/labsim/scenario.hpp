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

#ifndef MINIFLEET_LABSIM_SCENARIO_HPP_
#define MINIFLEET_LABSIM_SCENARIO_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "minifleet/control/mlc.hpp"
#include "minifleet/dynamics.hpp"
#include "minifleet/trajectory.hpp"

namespace minifleet::labsim {

/// External positioning model: per-observation loss, fixed transmission
/// delay and noise drawn uniformly inside the worst-case bounds (position in
/// a disk, yaw in an interval) — errors never exceed the bounds.
struct IpsModel {
  double position_bound{0.0325};              // [m]
  double yaw_bound{2.25 * M_PI / 180.0};      // [rad]
  int delay_steps{1};
  double loss_probability{0.01};
};

/// Per-link message transport model.
struct NetworkModel {
  int latency_steps{1};
  int jitter_steps{1};
  double loss_probability{0.01};
};

struct LabConfig {
  double arena_width{4.5};   // [m]
  double arena_height{4.0};  // [m]
  double dt{kDefaultTimestep};
  IpsModel ips{};
  NetworkModel network{};
  std::uint64_t seed{1};

  /// Noiseless, lossless, zero-delay variant for tests.
  static LabConfig ideal();
};

struct DirectSegment {
  double until{0.0};  // segment active while t < until
  double m{0.0};
  double d{0.0};
};

/// What the (simulated) high-level side sends to one vehicle.
struct ScriptSpec {
  enum class Type { kTrajectory, kDirect, kIdle };
  Type type{Type::kTrajectory};

  // Trajectory source: a built-in shape, a CSV file, or inline points.
  std::string shape;  // "figure_eight" | "circle" | "" for file/points
  double speed{1.0};
  double ramp_time{2.0};
  double shape_cx{2.25}, shape_cy{2.0};
  double shape_a{2.0}, shape_b{0.8};  // figure-eight half extents
  double shape_radius{1.2};           // circle
  std::filesystem::path trajectory_file;
  std::vector<TrajectoryPoint> points;
  double emit_period{0.5};  // [s] between segment messages
  double lookahead{3.0};    // [s] of future knots to publish

  std::vector<DirectSegment> direct;  // kDirect: piecewise-constant inputs
};

struct VehicleSpec {
  int id{0};
  VehicleState initial{};
  PhysicalParams physical = PhysicalParams::defaults();
  /// Model the onboard controller predicts with; defaults to the small-angle
  /// grey-box equivalent of `physical`.
  std::optional<ModelParams> controller_model;
  control::ControllerType controller{control::ControllerType::kMpc};
  int actuation_delay{5};  // steps
  double battery_voltage{kNominalVoltage};
  double odometer_ticks_per_meter{330.0};  // 6 angles/rev * 55 rev/m
  ScriptSpec script;

  ModelParams effective_controller_model() const {
    return controller_model ? *controller_model
                            : grey_box_equivalent(physical);
  }
};

struct ScenarioSpec {
  double duration{20.0};  // [s]
  std::vector<VehicleSpec> vehicles;

  /// Single vehicle following the default figure-eight.
  static ScenarioSpec figure_eight_single(
      double speed = 1.0,
      control::ControllerType controller = control::ControllerType::kMpc,
      double duration = 20.0);
  /// `count` vehicles on disjoint circles.
  static ScenarioSpec fleet_circles(int count, double duration = 10.0);
};

/// Empty when valid; otherwise one message per problem.
std::vector<std::string> validate_scenario(const ScenarioSpec& spec,
                                           const LabConfig& lab);

nlohmann::json lab_config_json(const LabConfig& lab);
LabConfig lab_config_from_json(const nlohmann::json& j);
LabConfig load_lab_config(const std::filesystem::path& path);

nlohmann::json scenario_json(const ScenarioSpec& spec);
ScenarioSpec scenario_from_json(const nlohmann::json& j);
ScenarioSpec load_scenario(const std::filesystem::path& path);
void save_scenario(const std::filesystem::path& path,
                   const ScenarioSpec& spec);
void save_lab_config(const std::filesystem::path& path, const LabConfig& lab);

}  // namespace minifleet::labsim

#endif  // MINIFLEET_LABSIM_SCENARIO_HPP_
