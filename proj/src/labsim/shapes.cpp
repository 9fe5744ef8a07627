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

#include "minifleet/labsim/shapes.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace minifleet::labsim {

namespace {

struct Curve {
  std::function<void(double, double&, double&)> position;
  std::function<void(double, double&, double&)> derivative;
};

// Closed-curve arc-length table over one period of the parameter.
class ArcTable {
 public:
  ArcTable(const Curve& curve, int samples = 16384) : curve_(curve) {
    theta_.resize(samples + 1);
    arc_.resize(samples + 1);
    double px = 0.0, py = 0.0;
    curve.position(0.0, px, py);
    arc_[0] = 0.0;
    theta_[0] = 0.0;
    for (int i = 1; i <= samples; ++i) {
      const double theta = 2.0 * M_PI * i / samples;
      double x = 0.0, y = 0.0;
      curve.position(theta, x, y);
      arc_[i] = arc_[i - 1] + std::hypot(x - px, y - py);
      theta_[i] = theta;
      px = x;
      py = y;
    }
  }

  double perimeter() const { return arc_.back(); }

  // Parameter at a given (wrapped) arc length.
  double theta_at(double s) const {
    s = std::fmod(s, perimeter());
    if (s < 0.0) s += perimeter();
    const auto it = std::lower_bound(arc_.begin(), arc_.end(), s);
    if (it == arc_.begin()) return theta_.front();
    const std::size_t hi = static_cast<std::size_t>(it - arc_.begin());
    const double span = arc_[hi] - arc_[hi - 1];
    const double f = span > 0.0 ? (s - arc_[hi - 1]) / span : 0.0;
    return theta_[hi - 1] + f * (theta_[hi] - theta_[hi - 1]);
  }

 private:
  const Curve& curve_;
  std::vector<double> theta_;
  std::vector<double> arc_;
};

// Distance covered by time t under a ramp-then-constant speed profile.
double ramp_distance(double t, double speed, double ramp_time) {
  if (ramp_time <= 0.0) return speed * t;
  if (t < ramp_time) return 0.5 * speed * t * t / ramp_time;
  return 0.5 * speed * ramp_time + speed * (t - ramp_time);
}

double ramp_speed(double t, double speed, double ramp_time) {
  if (ramp_time <= 0.0) return speed;
  return t >= ramp_time ? speed : speed * t / ramp_time;
}

ShapedTrajectory sample_curve(const Curve& curve, double speed,
                              double ramp_time, double duration,
                              double knot_dt) {
  const ArcTable table(curve);
  std::vector<TrajectoryPoint> points;
  const int knots = static_cast<int>(std::floor(duration / knot_dt)) + 1;
  points.reserve(knots);
  for (int i = 0; i < knots; ++i) {
    const double t = i * knot_dt;
    const double s = ramp_distance(t, speed, ramp_time);
    const double v = ramp_speed(t, speed, ramp_time);
    const double theta = table.theta_at(s);
    double x = 0.0, y = 0.0, dx = 0.0, dy = 0.0;
    curve.position(theta, x, y);
    curve.derivative(theta, dx, dy);
    const double norm = std::hypot(dx, dy);
    points.push_back({t, x, y, v * dx / norm, v * dy / norm});
  }
  ShapedTrajectory shaped{Trajectory(std::move(points)), {}};
  const TrajectoryPoint& first = shaped.trajectory.points().front();
  double dx = 0.0, dy = 0.0;
  curve.derivative(0.0, dx, dy);
  shaped.start_pose = {first.x, first.y, std::atan2(dy, dx), 0.0};
  return shaped;
}

}  // namespace

ShapedTrajectory figure_eight_trajectory(double cx, double cy, double a,
                                         double b, double speed,
                                         double ramp_time, double duration,
                                         double knot_dt) {
  Curve curve;
  curve.position = [=](double th, double& x, double& y) {
    x = cx + a * std::sin(th);
    y = cy + b * std::sin(2.0 * th);
  };
  curve.derivative = [=](double th, double& dx, double& dy) {
    dx = a * std::cos(th);
    dy = 2.0 * b * std::cos(2.0 * th);
  };
  return sample_curve(curve, speed, ramp_time, duration, knot_dt);
}

ShapedTrajectory circle_trajectory(double cx, double cy, double radius,
                                   double speed, double ramp_time,
                                   double duration, double knot_dt) {
  Curve curve;
  curve.position = [=](double th, double& x, double& y) {
    x = cx + radius * std::cos(th);
    y = cy + radius * std::sin(th);
  };
  curve.derivative = [=](double th, double& dx, double& dy) {
    dx = -radius * std::sin(th);
    dy = radius * std::cos(th);
  };
  return sample_curve(curve, speed, ramp_time, duration, knot_dt);
}

}  // namespace minifleet::labsim
