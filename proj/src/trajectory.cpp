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

#include "minifleet/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "minifleet/io/csv.hpp"

namespace minifleet {

namespace {

bool point_finite(const TrajectoryPoint& p) {
  return std::isfinite(p.t) && std::isfinite(p.x) && std::isfinite(p.y) &&
         std::isfinite(p.vx) && std::isfinite(p.vy);
}

}  // namespace

std::vector<TrajectoryViolation> validate_points(
    std::span<const TrajectoryPoint> points, double speed_bound) {
  std::vector<TrajectoryViolation> violations;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const TrajectoryPoint& p = points[i];
    if (!point_finite(p)) {
      violations.push_back({TrajectoryViolation::Kind::kNonFinite, i,
                            "point " + std::to_string(i) +
                                " has a non-finite field"});
      continue;
    }
    if (i > 0 && !(p.t > points[i - 1].t)) {
      violations.push_back({TrajectoryViolation::Kind::kNonMonotonicTime, i,
                            "point " + std::to_string(i) + " time " +
                                io::format_double(p.t) +
                                " does not increase past " +
                                io::format_double(points[i - 1].t)});
    }
    const double speed = std::hypot(p.vx, p.vy);
    if (speed > speed_bound) {
      violations.push_back({TrajectoryViolation::Kind::kSpeedBound, i,
                            "point " + std::to_string(i) + " speed " +
                                io::format_double(speed) + " exceeds bound " +
                                io::format_double(speed_bound)});
    }
  }
  return violations;
}

Trajectory::Trajectory(std::vector<TrajectoryPoint> points) {
  if (points.empty()) {
    throw std::invalid_argument("trajectory needs at least one point");
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!point_finite(points[i])) {
      throw std::invalid_argument("trajectory point " + std::to_string(i) +
                                  " has a non-finite field");
    }
    if (i > 0 && !(points[i].t > points[i - 1].t)) {
      throw std::invalid_argument(
          "trajectory times must be strictly increasing at point " +
          std::to_string(i));
    }
  }
  points_ = std::move(points);
}

bool Trajectory::append(const TrajectoryPoint& pt) {
  if (!point_finite(pt)) return false;
  if (!points_.empty() && !(pt.t > points_.back().t)) return false;
  points_.push_back(pt);
  return true;
}

double Trajectory::start_time() const {
  if (points_.empty()) throw std::logic_error("empty trajectory");
  return points_.front().t;
}

double Trajectory::end_time() const {
  if (points_.empty()) throw std::logic_error("empty trajectory");
  return points_.back().t;
}

ReferenceSample Trajectory::interpolate(double t_query) const {
  if (points_.empty()) throw std::logic_error("empty trajectory");
  const TrajectoryPoint& first = points_.front();
  const TrajectoryPoint& last = points_.back();
  if (t_query < first.t) {
    return {first.x, first.y, 0.0, 0.0};
  }
  if (t_query > last.t) {
    return {last.x, last.y, 0.0, 0.0};
  }
  // Knot queries return the knot exactly (including its velocity).
  auto it = std::lower_bound(
      points_.begin(), points_.end(), t_query,
      [](const TrajectoryPoint& p, double t) { return p.t < t; });
  if (it != points_.end() && it->t == t_query) {
    return {it->x, it->y, it->vx, it->vy};
  }
  const TrajectoryPoint& p0 = *(it - 1);
  const TrajectoryPoint& p1 = *it;
  const double h = p1.t - p0.t;
  const double s = (t_query - p0.t) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  // Hermite basis on normalized time; endpoint derivatives scaled by the
  // segment duration.
  const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
  const double h10 = s3 - 2.0 * s2 + s;
  const double h01 = -2.0 * s3 + 3.0 * s2;
  const double h11 = s3 - s2;
  const double g00 = 6.0 * s2 - 6.0 * s;
  const double g10 = 3.0 * s2 - 4.0 * s + 1.0;
  const double g01 = -6.0 * s2 + 6.0 * s;
  const double g11 = 3.0 * s2 - 2.0 * s;
  ReferenceSample out;
  out.x = h00 * p0.x + h10 * h * p0.vx + h01 * p1.x + h11 * h * p1.vx;
  out.y = h00 * p0.y + h10 * h * p0.vy + h01 * p1.y + h11 * h * p1.vy;
  out.vx = (g00 * p0.x + g01 * p1.x) / h + g10 * p0.vx + g11 * p1.vx;
  out.vy = (g00 * p0.y + g01 * p1.y) / h + g10 * p0.vy + g11 * p1.vy;
  return out;
}

Trajectory load_trajectory_csv(const std::filesystem::path& path) {
  const io::CsvTable table = io::read_csv(path);
  const std::vector<std::string> expected = {"t", "x", "y", "vx", "vy"};
  if (table.header != expected) {
    throw io::ParseError("expected header t,x,y,vx,vy", 1);
  }
  std::vector<TrajectoryPoint> points;
  points.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const std::size_t line = table.row_lines[i];
    if (row.size() != 5) {
      throw io::ParseError("expected 5 fields, got " +
                               std::to_string(row.size()),
                           line);
    }
    try {
      points.push_back({io::parse_double(row[0]), io::parse_double(row[1]),
                        io::parse_double(row[2]), io::parse_double(row[3]),
                        io::parse_double(row[4])});
    } catch (const std::invalid_argument& e) {
      throw io::ParseError(e.what(), line);
    }
    if (points.size() > 1 && !(points.back().t > points[points.size() - 2].t)) {
      throw io::ParseError("trajectory times must be strictly increasing",
                           line);
    }
  }
  return Trajectory(std::move(points));
}

void save_trajectory_csv(const std::filesystem::path& path,
                         const Trajectory& trajectory) {
  std::ostringstream out;
  out << "t,x,y,vx,vy\n";
  for (const TrajectoryPoint& p : trajectory.points()) {
    out << io::format_double(p.t) << ',' << io::format_double(p.x) << ','
        << io::format_double(p.y) << ',' << io::format_double(p.vx) << ','
        << io::format_double(p.vy) << '\n';
  }
  io::write_file(path, out.str());
}

}  // namespace minifleet
