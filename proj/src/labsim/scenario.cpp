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

#include "minifleet/labsim/scenario.hpp"

#include <cmath>
#include <set>

#include "minifleet/io/csv.hpp"
#include "minifleet/labsim/shapes.hpp"

namespace minifleet::labsim {

namespace {

using nlohmann::json;

std::string controller_name(control::ControllerType type) {
  switch (type) {
    case control::ControllerType::kMpc:
      return "mpc";
    case control::ControllerType::kPid:
      return "pid";
    case control::ControllerType::kNone:
      return "none";
  }
  return "none";
}

control::ControllerType controller_from_name(const std::string& name) {
  if (name == "mpc") return control::ControllerType::kMpc;
  if (name == "pid") return control::ControllerType::kPid;
  if (name == "none") return control::ControllerType::kNone;
  throw std::runtime_error("unknown controller type '" + name + "'");
}

}  // namespace

LabConfig LabConfig::ideal() {
  LabConfig lab;
  lab.ips = IpsModel{0.0, 0.0, 0, 0.0};
  lab.network = NetworkModel{0, 0, 0.0};
  return lab;
}

ScenarioSpec ScenarioSpec::figure_eight_single(
    double speed, control::ControllerType controller, double duration) {
  ScenarioSpec spec;
  spec.duration = duration;
  VehicleSpec vehicle;
  vehicle.id = 0;
  vehicle.controller = controller;
  vehicle.script.type = ScriptSpec::Type::kTrajectory;
  vehicle.script.shape = "figure_eight";
  vehicle.script.speed = speed;
  // Start pose on the shape; matches figure_eight_trajectory defaults.
  const ShapedTrajectory shaped = figure_eight_trajectory(
      vehicle.script.shape_cx, vehicle.script.shape_cy, vehicle.script.shape_a,
      vehicle.script.shape_b, speed, vehicle.script.ramp_time, duration);
  vehicle.initial = shaped.start_pose;
  spec.vehicles.push_back(vehicle);
  return spec;
}

ScenarioSpec ScenarioSpec::fleet_circles(int count, double duration) {
  ScenarioSpec spec;
  spec.duration = duration;
  const int columns = 5;
  for (int i = 0; i < count; ++i) {
    VehicleSpec vehicle;
    vehicle.id = i;
    vehicle.controller = control::ControllerType::kPid;
    vehicle.script.type = ScriptSpec::Type::kTrajectory;
    vehicle.script.shape = "circle";
    vehicle.script.shape_radius = 0.33;
    vehicle.script.shape_cx = 0.5 + 0.875 * (i % columns);
    vehicle.script.shape_cy = 0.55 + 0.95 * (i / columns);
    vehicle.script.speed = 0.6;
    vehicle.script.ramp_time = 1.5;
    const ShapedTrajectory shaped = circle_trajectory(
        vehicle.script.shape_cx, vehicle.script.shape_cy,
        vehicle.script.shape_radius, vehicle.script.speed,
        vehicle.script.ramp_time, duration);
    vehicle.initial = shaped.start_pose;
    spec.vehicles.push_back(vehicle);
  }
  return spec;
}

std::vector<std::string> validate_scenario(const ScenarioSpec& spec,
                                           const LabConfig& lab) {
  std::vector<std::string> problems;
  if (!(spec.duration > 0.0)) {
    problems.push_back("duration must be positive");
  }
  if (spec.vehicles.empty()) {
    problems.push_back("scenario needs at least one vehicle");
  }
  std::set<int> ids;
  for (const VehicleSpec& vehicle : spec.vehicles) {
    const std::string tag = "vehicle " + std::to_string(vehicle.id);
    if (!ids.insert(vehicle.id).second) {
      problems.push_back(tag + ": duplicate id");
    }
    if (!vehicle.initial.all_finite()) {
      problems.push_back(tag + ": non-finite initial state");
    }
    if (vehicle.initial.x < 0.0 || vehicle.initial.x > lab.arena_width ||
        vehicle.initial.y < 0.0 || vehicle.initial.y > lab.arena_height) {
      problems.push_back(tag + ": initial position outside the arena");
    }
    if (!vehicle.physical.valid()) {
      problems.push_back(tag + ": invalid physical parameters");
    }
    if (vehicle.actuation_delay < 0) {
      problems.push_back(tag + ": negative actuation delay");
    }
    if (vehicle.script.type == ScriptSpec::Type::kTrajectory &&
        vehicle.script.shape.empty() && vehicle.script.points.empty() &&
        vehicle.script.trajectory_file.empty()) {
      problems.push_back(tag + ": trajectory script without a source");
    }
  }
  if (!(lab.dt > 0.0)) problems.push_back("lab dt must be positive");
  if (lab.ips.loss_probability < 0.0 || lab.ips.loss_probability > 1.0 ||
      lab.network.loss_probability < 0.0 ||
      lab.network.loss_probability > 1.0) {
    problems.push_back("loss probabilities must lie in [0, 1]");
  }
  if (lab.ips.position_bound < 0.0 || lab.ips.yaw_bound < 0.0 ||
      lab.ips.delay_steps < 0 || lab.network.latency_steps < 0 ||
      lab.network.jitter_steps < 0) {
    problems.push_back("noise bounds and delays must be non-negative");
  }
  return problems;
}

json lab_config_json(const LabConfig& lab) {
  return {{"arena", {{"width", lab.arena_width}, {"height", lab.arena_height}}},
          {"dt", lab.dt},
          {"ips",
           {{"position_bound", lab.ips.position_bound},
            {"yaw_bound", lab.ips.yaw_bound},
            {"delay_steps", lab.ips.delay_steps},
            {"loss_probability", lab.ips.loss_probability}}},
          {"network",
           {{"latency_steps", lab.network.latency_steps},
            {"jitter_steps", lab.network.jitter_steps},
            {"loss_probability", lab.network.loss_probability}}},
          {"seed", lab.seed}};
}

LabConfig lab_config_from_json(const json& j) {
  LabConfig lab;
  if (j.contains("arena")) {
    lab.arena_width = j["arena"].value("width", lab.arena_width);
    lab.arena_height = j["arena"].value("height", lab.arena_height);
  }
  lab.dt = j.value("dt", lab.dt);
  if (j.contains("ips")) {
    const json& ips = j["ips"];
    lab.ips.position_bound = ips.value("position_bound", lab.ips.position_bound);
    lab.ips.yaw_bound = ips.value("yaw_bound", lab.ips.yaw_bound);
    lab.ips.delay_steps = ips.value("delay_steps", lab.ips.delay_steps);
    lab.ips.loss_probability =
        ips.value("loss_probability", lab.ips.loss_probability);
  }
  if (j.contains("network")) {
    const json& net = j["network"];
    lab.network.latency_steps =
        net.value("latency_steps", lab.network.latency_steps);
    lab.network.jitter_steps =
        net.value("jitter_steps", lab.network.jitter_steps);
    lab.network.loss_probability =
        net.value("loss_probability", lab.network.loss_probability);
  }
  lab.seed = j.value("seed", lab.seed);
  return lab;
}

LabConfig load_lab_config(const std::filesystem::path& path) {
  return lab_config_from_json(json::parse(io::read_file(path)));
}

void save_lab_config(const std::filesystem::path& path, const LabConfig& lab) {
  io::write_file(path, lab_config_json(lab).dump(2) + "\n");
}

namespace {

json script_json(const ScriptSpec& script) {
  json j;
  switch (script.type) {
    case ScriptSpec::Type::kTrajectory:
      j["type"] = "trajectory";
      break;
    case ScriptSpec::Type::kDirect:
      j["type"] = "direct";
      break;
    case ScriptSpec::Type::kIdle:
      j["type"] = "idle";
      break;
  }
  if (script.type == ScriptSpec::Type::kTrajectory) {
    if (!script.shape.empty()) {
      j["shape"] = script.shape;
      j["center"] = {script.shape_cx, script.shape_cy};
      if (script.shape == "figure_eight") {
        j["half_extents"] = {script.shape_a, script.shape_b};
      } else {
        j["radius"] = script.shape_radius;
      }
    }
    if (!script.trajectory_file.empty()) {
      j["file"] = script.trajectory_file.string();
    }
    if (!script.points.empty()) {
      json pts = json::array();
      for (const TrajectoryPoint& p : script.points) {
        pts.push_back({p.t, p.x, p.y, p.vx, p.vy});
      }
      j["points"] = pts;
    }
    j["speed"] = script.speed;
    j["ramp_time"] = script.ramp_time;
    j["emit_period"] = script.emit_period;
    j["lookahead"] = script.lookahead;
  }
  if (script.type == ScriptSpec::Type::kDirect) {
    json segs = json::array();
    for (const DirectSegment& seg : script.direct) {
      segs.push_back({{"until", seg.until}, {"m", seg.m}, {"d", seg.d}});
    }
    j["segments"] = segs;
  }
  return j;
}

ScriptSpec script_from_json(const json& j) {
  ScriptSpec script;
  const std::string type = j.value("type", std::string("trajectory"));
  if (type == "trajectory") {
    script.type = ScriptSpec::Type::kTrajectory;
    script.shape = j.value("shape", std::string());
    if (j.contains("center")) {
      script.shape_cx = j["center"][0].get<double>();
      script.shape_cy = j["center"][1].get<double>();
    }
    if (j.contains("half_extents")) {
      script.shape_a = j["half_extents"][0].get<double>();
      script.shape_b = j["half_extents"][1].get<double>();
    }
    script.shape_radius = j.value("radius", script.shape_radius);
    if (j.contains("file")) {
      script.trajectory_file = j["file"].get<std::string>();
    }
    if (j.contains("points")) {
      for (const json& p : j["points"]) {
        script.points.push_back({p[0].get<double>(), p[1].get<double>(),
                                 p[2].get<double>(), p[3].get<double>(),
                                 p[4].get<double>()});
      }
    }
    script.speed = j.value("speed", script.speed);
    script.ramp_time = j.value("ramp_time", script.ramp_time);
    script.emit_period = j.value("emit_period", script.emit_period);
    script.lookahead = j.value("lookahead", script.lookahead);
  } else if (type == "direct") {
    script.type = ScriptSpec::Type::kDirect;
    for (const json& seg : j.value("segments", json::array())) {
      script.direct.push_back({seg.at("until").get<double>(),
                               seg.at("m").get<double>(),
                               seg.at("d").get<double>()});
    }
  } else if (type == "idle") {
    script.type = ScriptSpec::Type::kIdle;
  } else {
    throw std::runtime_error("unknown script type '" + type + "'");
  }
  return script;
}

}  // namespace

json scenario_json(const ScenarioSpec& spec) {
  json vehicles = json::array();
  for (const VehicleSpec& v : spec.vehicles) {
    json jv = {
        {"id", v.id},
        {"initial",
         {{"x", v.initial.x},
          {"y", v.initial.y},
          {"psi", v.initial.psi},
          {"v", v.initial.v}}},
        {"controller", controller_name(v.controller)},
        {"actuation_delay", v.actuation_delay},
        {"battery_voltage", v.battery_voltage},
        {"odometer_ticks_per_meter", v.odometer_ticks_per_meter},
        {"physical",
         {{"wheelbase", v.physical.wheelbase},
          {"rear_to_ref", v.physical.rear_to_ref},
          {"speed_gain", v.physical.speed_gain},
          {"speed_time_constant", v.physical.speed_time_constant},
          {"max_steering_angle", v.physical.max_steering_angle},
          {"max_input_speed", v.physical.max_input_speed}}},
        {"script", script_json(v.script)},
    };
    if (v.controller_model) {
      const auto p = v.controller_model->to_array();
      jv["model_params"] = std::vector<double>(p.begin(), p.end());
    }
    vehicles.push_back(jv);
  }
  return {{"duration", spec.duration}, {"vehicles", vehicles}};
}

ScenarioSpec scenario_from_json(const json& j) {
  ScenarioSpec spec;
  spec.duration = j.value("duration", spec.duration);
  for (const json& jv : j.value("vehicles", json::array())) {
    VehicleSpec v;
    v.id = jv.value("id", static_cast<int>(spec.vehicles.size()));
    if (jv.contains("initial")) {
      const json& init = jv["initial"];
      v.initial = {init.value("x", 0.0), init.value("y", 0.0),
                   init.value("psi", 0.0), init.value("v", 0.0)};
    }
    v.controller =
        controller_from_name(jv.value("controller", std::string("mpc")));
    v.actuation_delay = jv.value("actuation_delay", v.actuation_delay);
    v.battery_voltage = jv.value("battery_voltage", v.battery_voltage);
    v.odometer_ticks_per_meter =
        jv.value("odometer_ticks_per_meter", v.odometer_ticks_per_meter);
    if (jv.contains("physical")) {
      const json& phys = jv["physical"];
      v.physical.wheelbase = phys.value("wheelbase", v.physical.wheelbase);
      v.physical.rear_to_ref =
          phys.value("rear_to_ref", v.physical.rear_to_ref);
      v.physical.speed_gain = phys.value("speed_gain", v.physical.speed_gain);
      v.physical.speed_time_constant =
          phys.value("speed_time_constant", v.physical.speed_time_constant);
      v.physical.max_steering_angle =
          phys.value("max_steering_angle", v.physical.max_steering_angle);
      v.physical.max_input_speed =
          phys.value("max_input_speed", v.physical.max_input_speed);
    }
    if (jv.contains("model_params")) {
      const auto values = jv["model_params"].get<std::vector<double>>();
      if (values.size() != 10) {
        throw std::runtime_error("model_params must have 10 entries");
      }
      std::array<double, 10> p;
      std::copy(values.begin(), values.end(), p.begin());
      v.controller_model = ModelParams::from_array(p);
    }
    if (jv.contains("script")) {
      v.script = script_from_json(jv["script"]);
    }
    spec.vehicles.push_back(std::move(v));
  }
  return spec;
}

ScenarioSpec load_scenario(const std::filesystem::path& path) {
  return scenario_from_json(json::parse(io::read_file(path)));
}

void save_scenario(const std::filesystem::path& path,
                   const ScenarioSpec& spec) {
  io::write_file(path, scenario_json(spec).dump(2) + "\n");
}

}  // namespace minifleet::labsim
