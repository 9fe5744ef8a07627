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

#ifndef MINIFLEET_LABSIM_SHAPES_HPP_
#define MINIFLEET_LABSIM_SHAPES_HPP_

#include "minifleet/dynamics.hpp"
#include "minifleet/trajectory.hpp"

namespace minifleet::labsim {

/// Trajectory plus the pose a vehicle should start from to be on it at t=0.
struct ShapedTrajectory {
  Trajectory trajectory;
  VehicleState start_pose;  // v = 0; the speed profile ramps up
};

/// Figure-eight (x = cx + a sin(th), y = cy + b sin(2 th)) traversed at
/// constant path speed after a linear ramp of ramp_time seconds. Knots every
/// knot_dt with exact tangent velocities. Defaults trace a 4.0 m x 1.6 m
/// eight with minimum curvature radius ~0.47 m.
ShapedTrajectory figure_eight_trajectory(double cx, double cy, double a,
                                         double b, double speed,
                                         double ramp_time, double duration,
                                         double knot_dt = 0.2);

/// Counter-clockwise circle at constant path speed after a ramp.
ShapedTrajectory circle_trajectory(double cx, double cy, double radius,
                                   double speed, double ramp_time,
                                   double duration, double knot_dt = 0.2);

}  // namespace minifleet::labsim

#endif  // MINIFLEET_LABSIM_SHAPES_HPP_
