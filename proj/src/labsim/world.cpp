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

#include "minifleet/labsim/world.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>

#include "minifleet/labsim/shapes.hpp"
#include "minifleet/trajectory.hpp"

namespace minifleet::labsim {

namespace {

Trajectory resolve_script_trajectory(const ScriptSpec& script,
                                     double duration) {
  if (!script.shape.empty()) {
    if (script.shape == "figure_eight") {
      return figure_eight_trajectory(script.shape_cx, script.shape_cy,
                                     script.shape_a, script.shape_b,
                                     script.speed, script.ramp_time, duration)
          .trajectory;
    }
    if (script.shape == "circle") {
      return circle_trajectory(script.shape_cx, script.shape_cy,
                               script.shape_radius, script.speed,
                               script.ramp_time, duration)
          .trajectory;
    }
    throw std::invalid_argument("unknown trajectory shape '" + script.shape +
                                "'");
  }
  if (!script.trajectory_file.empty()) {
    return load_trajectory_csv(script.trajectory_file);
  }
  return Trajectory(script.points);
}

struct ScriptRuntime {
  ScriptSpec spec;
  Trajectory trajectory;  // resolved, trajectory scripts only
  std::size_t next_knot{0};

  // Messages the high-level side publishes at this step.
  std::vector<std::pair<std::string, std::string>> emit(int step, double dt) {
    std::vector<std::pair<std::string, std::string>> out;
    const double t = step * dt;
    if (spec.type == ScriptSpec::Type::kDirect) {
      for (const DirectSegment& seg : spec.direct) {
        if (t < seg.until) {
          out.emplace_back("direct_input",
                           control::encode_message(
                               control::DirectInput{seg.m, seg.d}));
          break;
        }
      }
      return out;
    }
    if (spec.type != ScriptSpec::Type::kTrajectory) return out;
    const int period_steps =
        std::max(1, static_cast<int>(std::lround(spec.emit_period / dt)));
    if (step % period_steps != 0) return out;
    const double horizon = t + spec.lookahead;
    control::TrajectorySegment segment;
    const auto& knots = trajectory.points();
    while (next_knot < knots.size() && knots[next_knot].t <= horizon) {
      segment.points.push_back(knots[next_knot]);
      ++next_knot;
    }
    if (!segment.points.empty()) {
      out.emplace_back("trajectory_segment", control::encode_message(segment));
    }
    return out;
  }
};

struct VehicleRuntime {
  VehicleSpec spec;
  control::MidLevelController mlc;
  ScriptRuntime script;
  VehicleState truth;
  std::deque<control::DirectInput> actuation_queue;
  RngStream ips_rng;
  std::vector<std::pair<int, control::IpsFix>> pending_fixes;
  int cmd_link{0};
  int state_link{0};
  // Sensor readings produced by the last world step, consumed by this tick.
  double odometer_reading{0.0};
  double gyro_reading{0.0};
  double odometer_distance{0.0};
  long long odometer_ticks{0};
  bool outside_arena{false};

  VehicleRuntime(const VehicleSpec& vspec, const control::MlcConfig& mlc_cfg)
      : spec(vspec), mlc(mlc_cfg) {}
};

control::MlcConfig make_mlc_config(const VehicleSpec& vehicle, double dt) {
  control::MlcConfig cfg;
  cfg.controller = vehicle.controller;
  cfg.model = vehicle.effective_controller_model();
  cfg.dt = dt;
  cfg.actuation_delay_steps = vehicle.actuation_delay;
  cfg.mpc.dt = dt;
  return cfg;
}

}  // namespace

SimTrace run_scenario(const ScenarioSpec& spec, const LabConfig& lab) {
  const std::vector<std::string> problems = validate_scenario(spec, lab);
  if (!problems.empty()) {
    std::string message = "invalid scenario:";
    for (const std::string& p : problems) message += "\n  " + p;
    throw std::invalid_argument(message);
  }

  const double dt = lab.dt;
  const int steps = static_cast<int>(std::lround(spec.duration / dt));
  SimTrace trace;
  trace.seed = lab.seed;
  trace.dt = dt;
  trace.steps = steps;

  MessageBus bus(lab.network);
  std::vector<VehicleRuntime> fleet;
  fleet.reserve(spec.vehicles.size());
  for (const VehicleSpec& vspec : spec.vehicles) {
    VehicleRuntime runtime(vspec, make_mlc_config(vspec, dt));
    runtime.truth = vspec.initial;
    runtime.script.spec = vspec.script;
    if (vspec.script.type == ScriptSpec::Type::kTrajectory) {
      runtime.script.trajectory =
          resolve_script_trajectory(vspec.script, spec.duration);
      trace.references.emplace(vspec.id, runtime.script.trajectory);
    }
    runtime.actuation_queue.assign(
        static_cast<std::size_t>(vspec.actuation_delay),
        control::DirectInput{});
    runtime.ips_rng = RngStream::keyed(
        lab.seed, "ips", static_cast<std::uint64_t>(vspec.id), 0);
    const std::string base = "veh" + std::to_string(vspec.id);
    runtime.cmd_link =
        bus.add_link(base + ".cmd", lab.seed,
                     static_cast<std::uint64_t>(vspec.id), 0);
    runtime.state_link =
        bus.add_link(base + ".state", lab.seed,
                     static_cast<std::uint64_t>(vspec.id), 1);
    runtime.odometer_reading = vspec.initial.v;
    fleet.push_back(std::move(runtime));
  }

  auto observe_ips = [&](VehicleRuntime& vehicle, int measured_step) {
    IpsRow row;
    row.vehicle = vehicle.spec.id;
    row.measured_step = measured_step;
    if (vehicle.ips_rng.bernoulli(lab.ips.loss_probability)) {
      row.lost = true;
      row.deliver_step = -1;
      row.x = row.y = row.psi = 0.0;
      trace.ips.push_back(row);
      return;
    }
    // Uniform in a disk of radius position_bound; worst-case compliant.
    const double radius = lab.ips.position_bound *
                          std::sqrt(vehicle.ips_rng.uniform01());
    const double angle = 2.0 * M_PI * vehicle.ips_rng.uniform01();
    const double yaw_err =
        vehicle.ips_rng.uniform(-lab.ips.yaw_bound, lab.ips.yaw_bound);
    row.lost = false;
    row.deliver_step = measured_step + lab.ips.delay_steps;
    row.x = vehicle.truth.x + radius * std::cos(angle);
    row.y = vehicle.truth.y + radius * std::sin(angle);
    row.psi = vehicle.truth.psi + yaw_err;
    trace.ips.push_back(row);
    vehicle.pending_fixes.emplace_back(
        row.deliver_step,
        control::IpsFix{row.x, row.y, row.psi, measured_step});
  };

  // Step 0 state is observable before the loop starts.
  for (VehicleRuntime& vehicle : fleet) {
    trace.truth.push_back({0, vehicle.spec.id, vehicle.truth});
    observe_ips(vehicle, 0);
  }

  for (int k = 0; k < steps; ++k) {
    for (VehicleRuntime& vehicle : fleet) {
      // (1) High-level side publishes.
      for (auto& [type, text] : vehicle.script.emit(k, dt)) {
        bus.send(vehicle.cmd_link, k, type, text);
      }
      // (2) Transport delivers.
      const std::vector<std::string> inbox = bus.deliver(vehicle.cmd_link, k);
      bus.deliver(vehicle.state_link, k);  // drain the uplink queue

      // (3) Sensors for this tick.
      control::SensorFrame sensors;
      sensors.odometer_speed = vehicle.odometer_reading;
      sensors.yaw_rate = vehicle.gyro_reading;
      sensors.battery_voltage = vehicle.spec.battery_voltage;
      for (auto it = vehicle.pending_fixes.begin();
           it != vehicle.pending_fixes.end();) {
        if (it->first == k) {
          sensors.ips = it->second;
          it = vehicle.pending_fixes.erase(it);
        } else {
          ++it;
        }
      }

      // (4) Onboard controller tick.
      const control::MlcTickOutput out = vehicle.mlc.tick(inbox, sensors);
      trace.commands.push_back({vehicle.spec.id, k,
                                k + vehicle.spec.actuation_delay,
                                out.command.m, out.command.d, out.command.u,
                                out.mode, out.safe_stop});
      trace.estimates.push_back({vehicle.spec.id, k, out.estimate.state,
                                 out.estimate.ips_age_steps});
      bus.send(vehicle.state_link, k, "vehicle_state",
               control::encode_message(out.state_message));

      // (5) Actuation queue advances.
      vehicle.actuation_queue.push_back({out.command.m, out.command.d});
      const control::DirectInput effective = vehicle.actuation_queue.front();
      vehicle.actuation_queue.pop_front();

      // (6) World integrates the physical model, 4 Euler substeps.
      const ControlInput input{effective.m, effective.d,
                               vehicle.spec.battery_voltage};
      const double psi_before = vehicle.truth.psi;
      for (int sub = 0; sub < 4; ++sub) {
        vehicle.odometer_distance += vehicle.truth.v * (dt / 4.0);
        vehicle.truth =
            euler_step(vehicle.truth, input, vehicle.spec.physical, dt / 4.0);
      }
      // Hall-sensor odometer: whole ticks accumulated over the frame.
      const long long ticks_now = static_cast<long long>(std::floor(
          vehicle.odometer_distance * vehicle.spec.odometer_ticks_per_meter));
      const long long frame_ticks = ticks_now - vehicle.odometer_ticks;
      vehicle.odometer_ticks = ticks_now;
      vehicle.odometer_reading =
          static_cast<double>(frame_ticks) /
          (vehicle.spec.odometer_ticks_per_meter * dt);
      vehicle.gyro_reading = (vehicle.truth.psi - psi_before) / dt;

      // (7) Record truth; flag arena exits.
      trace.truth.push_back({k + 1, vehicle.spec.id, vehicle.truth});
      const bool outside =
          vehicle.truth.x < 0.0 || vehicle.truth.x > lab.arena_width ||
          vehicle.truth.y < 0.0 || vehicle.truth.y > lab.arena_height;
      if (outside && !vehicle.outside_arena) {
        trace.arena_exits.push_back(
            {vehicle.spec.id, k + 1, vehicle.truth.x, vehicle.truth.y});
      }
      vehicle.outside_arena = outside;

      // (8) Positioning system observes the new state.
      observe_ips(vehicle, k + 1);
    }
  }

  for (const MessageBus::Record& record : bus.log()) {
    trace.messages.push_back({bus.link_name(record.link), record.send_step,
                              record.deliver_step, record.type, record.text});
  }
  return trace;
}

TrackingStats tracking_stats(const SimTrace& trace, int vehicle_id,
                             double t_skip) {
  const auto ref_it = trace.references.find(vehicle_id);
  if (ref_it == trace.references.end()) {
    throw std::invalid_argument("vehicle has no reference trajectory");
  }
  const Trajectory& reference = ref_it->second;
  TrackingStats stats;
  double position_sum = 0.0;
  double yaw_sum = 0.0;
  double speed_sum = 0.0;
  int yaw_samples = 0;
  for (const TruthRow& row : trace.truth) {
    if (row.vehicle != vehicle_id) continue;
    const double t = row.step * trace.dt;
    if (t < t_skip || t > reference.end_time()) continue;
    const ReferenceSample ref = reference.interpolate(t);
    const double position_error =
        std::hypot(row.state.x - ref.x, row.state.y - ref.y);
    position_sum += position_error;
    stats.max_position_error =
        std::max(stats.max_position_error, position_error);
    const double ref_speed = std::hypot(ref.vx, ref.vy);
    speed_sum += std::abs(row.state.v - ref_speed);
    if (ref_speed > 0.05) {
      const double yaw_error = std::abs(
          std::remainder(row.state.psi - std::atan2(ref.vy, ref.vx),
                         2.0 * M_PI));
      yaw_sum += yaw_error;
      stats.max_yaw_error = std::max(stats.max_yaw_error, yaw_error);
      ++yaw_samples;
    }
    ++stats.samples;
  }
  if (stats.samples > 0) {
    stats.mean_position_error = position_sum / stats.samples;
    stats.mean_speed_error = speed_sum / stats.samples;
  }
  if (yaw_samples > 0) {
    stats.mean_yaw_error = yaw_sum / yaw_samples;
  }
  return stats;
}

}  // namespace minifleet::labsim
