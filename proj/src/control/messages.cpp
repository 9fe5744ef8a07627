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

#include "minifleet/control/messages.hpp"

#include <json.hpp>

namespace minifleet::control {

namespace {

using nlohmann::json;

json trajectory_points_json(const std::vector<TrajectoryPoint>& points) {
  json out = json::array();
  for (const TrajectoryPoint& p : points) {
    out.push_back({{"t", p.t},
                   {"x", p.x},
                   {"y", p.y},
                   {"vx", p.vx},
                   {"vy", p.vy}});
  }
  return out;
}

}  // namespace

std::string encode_message(const MessagePayload& payload) {
  json j;
  if (const auto* direct = std::get_if<DirectInput>(&payload)) {
    j = {{"type", "direct_input"},
         {"payload", {{"m", direct->m}, {"d", direct->d}}}};
  } else if (const auto* segment = std::get_if<TrajectorySegment>(&payload)) {
    j = {{"type", "trajectory_segment"},
         {"payload", {{"points", trajectory_points_json(segment->points)}}}};
  } else {
    const auto& state = std::get<VehicleStateMsg>(payload);
    j = {{"type", "vehicle_state"},
         {"payload",
          {{"t", state.t},
           {"x", state.x},
           {"y", state.y},
           {"psi", state.psi},
           {"v", state.v},
           {"m_applied", state.m_applied},
           {"d_applied", state.d_applied},
           {"ips_age", state.ips_age}}}};
  }
  return j.dump();
}

MessagePayload decode_message(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("malformed message: ") + e.what());
  }
  try {
    const std::string type = j.at("type").get<std::string>();
    const json& p = j.at("payload");
    if (type == "direct_input") {
      return DirectInput{p.at("m").get<double>(), p.at("d").get<double>()};
    }
    if (type == "trajectory_segment") {
      TrajectorySegment segment;
      for (const json& pt : p.at("points")) {
        segment.points.push_back({pt.at("t").get<double>(),
                                  pt.at("x").get<double>(),
                                  pt.at("y").get<double>(),
                                  pt.at("vx").get<double>(),
                                  pt.at("vy").get<double>()});
      }
      return segment;
    }
    if (type == "vehicle_state") {
      VehicleStateMsg msg;
      msg.t = p.at("t").get<double>();
      msg.x = p.at("x").get<double>();
      msg.y = p.at("y").get<double>();
      msg.psi = p.at("psi").get<double>();
      msg.v = p.at("v").get<double>();
      msg.m_applied = p.at("m_applied").get<double>();
      msg.d_applied = p.at("d_applied").get<double>();
      msg.ips_age = p.at("ips_age").get<int>();
      return msg;
    }
    throw std::runtime_error("malformed message: unknown type '" + type + "'");
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("malformed message: ") + e.what());
  }
}

}  // namespace minifleet::control
