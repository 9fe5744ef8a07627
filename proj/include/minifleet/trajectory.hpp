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

#ifndef MINIFLEET_TRAJECTORY_HPP_
#define MINIFLEET_TRAJECTORY_HPP_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace minifleet {

/// Timed reference tuple (t, x, y, vx, vy).
struct TrajectoryPoint {
  double t{0.0};   // [s]
  double x{0.0};   // [m]
  double y{0.0};   // [m]
  double vx{0.0};  // [m/s]
  double vy{0.0};  // [m/s]
};

/// Position/velocity reference at a query time.
struct ReferenceSample {
  double x{0.0};
  double y{0.0};
  double vx{0.0};
  double vy{0.0};
};

struct TrajectoryViolation {
  enum class Kind { kNonMonotonicTime, kNonFinite, kSpeedBound };
  Kind kind;
  std::size_t index;  // offending point
  std::string message;
};

/// Report-only checks on a raw point sequence: strictly increasing t, finite
/// fields, speed within bound.
std::vector<TrajectoryViolation> validate_points(
    std::span<const TrajectoryPoint> points, double speed_bound = 3.7);

/// Reference trajectory with cubic Hermite interpolation between knots.
///
/// Each segment interpolates x(t) and y(t) from its two endpoint values and
/// endpoint derivatives (vx, vy), on normalized segment time with the
/// derivative scaled by the segment duration. A segment therefore depends
/// only on its two endpoints: appending points never changes existing
/// segments. Queries before the first knot or after the last hold that
/// knot's position with zero velocity (a vehicle that has run out of
/// reference stops in place).
class Trajectory {
 public:
  Trajectory() = default;
  /// Throws std::invalid_argument unless points are finite with strictly
  /// increasing t (at least one point).
  explicit Trajectory(std::vector<TrajectoryPoint> points);

  /// Appends one point. Returns false (trajectory unchanged) if pt.t is not
  /// strictly greater than the last knot's t or pt is non-finite.
  bool append(const TrajectoryPoint& pt);

  /// Throws std::logic_error when empty.
  ReferenceSample interpolate(double t_query) const;

  bool empty() const { return points_.empty(); }
  std::size_t size() const { return points_.size(); }
  const std::vector<TrajectoryPoint>& points() const { return points_; }
  double start_time() const;
  double end_time() const;

 private:
  std::vector<TrajectoryPoint> points_;
};

/// CSV with header `t,x,y,vx,vy`, one point per row, strictly increasing t.
Trajectory load_trajectory_csv(const std::filesystem::path& path);
void save_trajectory_csv(const std::filesystem::path& path,
                         const Trajectory& trajectory);

}  // namespace minifleet

#endif  // MINIFLEET_TRAJECTORY_HPP_
