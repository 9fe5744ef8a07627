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

#ifndef MINIFLEET_CONTROL_MESSAGES_HPP_
#define MINIFLEET_CONTROL_MESSAGES_HPP_

#include <string>
#include <variant>
#include <vector>

#include "minifleet/trajectory.hpp"

namespace minifleet::control {

/// External controller output forwarded verbatim to the actuators.
struct DirectInput {
  double m{0.0};
  double d{0.0};
};

/// New reference knots for the onboard follower.
struct TrajectorySegment {
  std::vector<TrajectoryPoint> points;
};

/// Vehicle status broadcast every tick: estimated pose, speed, the command
/// at the actuators and the age (steps) of the last positioning fix.
struct VehicleStateMsg {
  double t{0.0};
  double x{0.0};
  double y{0.0};
  double psi{0.0};
  double v{0.0};
  double m_applied{0.0};
  double d_applied{0.0};
  int ips_age{-1};  // -1: no fix received yet
};

using MessagePayload =
    std::variant<DirectInput, TrajectorySegment, VehicleStateMsg>;

/// Wire encoding (JSON text, `type` + `payload` keys, field names as in the
/// structs above).
std::string encode_message(const MessagePayload& payload);
/// Throws std::runtime_error on malformed input.
MessagePayload decode_message(const std::string& text);

}  // namespace minifleet::control

#endif  // MINIFLEET_CONTROL_MESSAGES_HPP_
