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

#ifndef MINIFLEET_LABSIM_WORLD_HPP_
#define MINIFLEET_LABSIM_WORLD_HPP_

#include <map>

#include "minifleet/labsim/bus.hpp"
#include "minifleet/labsim/scenario.hpp"

namespace minifleet::labsim {

struct TruthRow {
  int step;
  int vehicle;
  VehicleState state;
};

struct IpsRow {
  int vehicle;
  int measured_step;
  int deliver_step;  // -1: lost
  bool lost;
  double x, y, psi;
};

struct CommandRow {
  int vehicle;
  int commanded_step;
  int applied_step;
  double m, d, u;
  control::OperatingMode mode;
  bool safe_stop;
};

struct MessageRow {
  std::string link;
  int send_step;
  int deliver_step;  // -1: lost
  std::string type;
  std::string payload;
};

struct EstimateRow {
  int vehicle;
  int step;
  VehicleState estimate;
  int ips_age;
};

struct ArenaEvent {
  int vehicle;
  int step;
  double x, y;
};

/// Complete record of one lock-step run; a pure function of
/// (scenario, lab config, seed), bitwise reproducible.
struct SimTrace {
  std::uint64_t seed{0};
  double dt{kDefaultTimestep};
  int steps{0};
  std::vector<TruthRow> truth;
  std::vector<IpsRow> ips;
  std::vector<CommandRow> commands;
  std::vector<MessageRow> messages;
  std::vector<EstimateRow> estimates;
  std::vector<ArenaEvent> arena_exits;
  std::map<int, Trajectory> references;  // per vehicle, trajectory scripts
};

/// Runs the lock-step loop: per step, scripts publish, the bus delivers,
/// every vehicle ticks its onboard controller, actuation queues advance, the
/// world integrates the physical model (4 Euler substeps per step), and the
/// positioning system observes. Throws std::invalid_argument with the
/// validation listing when the scenario is invalid.
SimTrace run_scenario(const ScenarioSpec& spec, const LabConfig& lab);

struct TrackingStats {
  double mean_position_error{0.0};
  double max_position_error{0.0};
  double mean_yaw_error{0.0};
  double max_yaw_error{0.0};
  double mean_speed_error{0.0};
  int samples{0};
};

/// Truth-vs-reference tracking errors for one vehicle, over t >= t_skip.
TrackingStats tracking_stats(const SimTrace& trace, int vehicle_id,
                             double t_skip = 0.0);

}  // namespace minifleet::labsim

#endif  // MINIFLEET_LABSIM_WORLD_HPP_
