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

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include <doctest.h>

#include "minifleet/io/csv.hpp"

namespace minifleet {
namespace {

Trajectory random_trajectory(std::uint64_t seed, int n_points) {
  std::mt19937_64 engine(seed);
  std::uniform_real_distribution<double> value(-3.0, 3.0);
  std::uniform_real_distribution<double> gap(0.05, 0.8);
  std::vector<TrajectoryPoint> points;
  double t = 0.0;
  for (int i = 0; i < n_points; ++i) {
    points.push_back({t, value(engine), value(engine), value(engine),
                      value(engine)});
    t += gap(engine);
  }
  return Trajectory(std::move(points));
}

TEST_CASE("construction enforces the invariants") {
  CHECK_THROWS_AS(Trajectory(std::vector<TrajectoryPoint>{}),
                  std::invalid_argument);
  CHECK_THROWS_AS(Trajectory({{0.0, 0, 0, 0, 0}, {0.0, 1, 0, 0, 0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      Trajectory({{0.0, 0, 0, 0, 0}, {1.0, std::nan(""), 0, 0, 0}}),
      std::invalid_argument);
  CHECK(Trajectory({{0.0, 1, 2, 0, 0}}).size() == 1);
}

TEST_CASE("append rejects non-increasing times and keeps the rest intact") {
  Trajectory traj({{0.0, 0, 0, 1, 0}});
  CHECK(traj.append({1.0, 1, 0, 1, 0}));
  CHECK(traj.size() == 2);
  CHECK_FALSE(traj.append({1.0, 2, 0, 0, 0}));  // equal t
  CHECK_FALSE(traj.append({0.5, 2, 0, 0, 0}));  // going back
  CHECK(traj.size() == 2);

  // Interpolation inside existing segments is bitwise unchanged by appends.
  Trajectory grown = random_trajectory(5, 12);
  const double t_end = grown.end_time();
  std::vector<double> queries;
  std::vector<ReferenceSample> before;
  for (int i = 0; i <= 200; ++i) {
    const double t = grown.start_time() + (t_end - grown.start_time()) * i /
                                              200.0;
    queries.push_back(t);
    before.push_back(grown.interpolate(t));
  }
  CHECK(grown.append({t_end + 0.3, 9.0, -9.0, 1.0, 1.0}));
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const ReferenceSample after = grown.interpolate(queries[i]);
    CHECK(after.x == before[i].x);
    CHECK(after.y == before[i].y);
    CHECK(after.vx == before[i].vx);
    CHECK(after.vy == before[i].vy);
  }
}

TEST_CASE("interpolation: knots, the linear case and the hold rule") {
  SUBCASE("knot queries reproduce the knot exactly") {
    const Trajectory traj = random_trajectory(9, 8);
    for (const TrajectoryPoint& p : traj.points()) {
      const ReferenceSample s = traj.interpolate(p.t);
      CHECK(s.x == p.x);
      CHECK(s.y == p.y);
      CHECK(s.vx == p.vx);
      CHECK(s.vy == p.vy);
    }
  }

  SUBCASE("two points on a line with matching velocity interpolate linearly") {
    const Trajectory traj({{0.0, 0.0, 0.0, 1.0, 0.0},
                           {1.0, 1.0, 0.0, 1.0, 0.0}});
    const ReferenceSample mid = traj.interpolate(0.5);
    CHECK(mid.x == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(mid.y == 0.0);
    CHECK(mid.vx == doctest::Approx(1.0).epsilon(1e-15));
  }

  SUBCASE("out-of-range queries hold position with zero velocity") {
    const Trajectory traj({{1.0, 2.0, 3.0, 0.5, -0.5},
                           {2.0, 4.0, 1.0, 0.5, 0.5}});
    const ReferenceSample before = traj.interpolate(0.0);
    CHECK(before.x == 2.0);
    CHECK(before.y == 3.0);
    CHECK(before.vx == 0.0);
    CHECK(before.vy == 0.0);
    const ReferenceSample after = traj.interpolate(9.0);
    CHECK(after.x == 4.0);
    CHECK(after.y == 1.0);
    CHECK(after.vx == 0.0);
    CHECK(after.vy == 0.0);
  }

  SUBCASE("empty trajectory queries are an error") {
    Trajectory traj;
    CHECK_THROWS_AS(traj.interpolate(0.0), std::logic_error);
  }
}

TEST_CASE("C1 continuity at interior knots") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull}) {
    const Trajectory traj = random_trajectory(seed, 10);
    const auto& pts = traj.points();
    for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
      const double t = pts[i].t;
      const double t_left = std::nextafter(t, -1e300);
      const ReferenceSample left = traj.interpolate(t_left);
      const ReferenceSample knot = traj.interpolate(t);
      const double scale_x = std::max({1.0, std::abs(knot.x),
                                       std::abs(knot.vx)});
      const double scale_y = std::max({1.0, std::abs(knot.y),
                                       std::abs(knot.vy)});
      CHECK(std::abs(left.x - knot.x) <= 1e-9 * scale_x);
      CHECK(std::abs(left.y - knot.y) <= 1e-9 * scale_y);
      CHECK(std::abs(left.vx - knot.vx) <= 1e-9 * scale_x);
      CHECK(std::abs(left.vy - knot.vy) <= 1e-9 * scale_y);
    }
  }
}

TEST_CASE("linear reproduction at arbitrary query times") {
  // Points on a line traversed at constant velocity, stored derivatives
  // equal to that velocity: the interpolant is the line itself.
  const double vx = 0.7, vy = -0.3;
  std::vector<TrajectoryPoint> points;
  for (int i = 0; i <= 6; ++i) {
    const double t = 0.4 * i;
    points.push_back({t, 1.0 + vx * t, -2.0 + vy * t, vx, vy});
  }
  const Trajectory traj(std::move(points));
  for (int i = 0; i <= 500; ++i) {
    const double t = 2.4 * i / 500.0;
    const ReferenceSample s = traj.interpolate(t);
    CHECK(s.x == doctest::Approx(1.0 + vx * t).epsilon(1e-12));
    CHECK(s.y == doctest::Approx(-2.0 + vy * t).epsilon(1e-12));
    CHECK(s.vx == doctest::Approx(vx).epsilon(1e-12));
    CHECK(s.vy == doctest::Approx(vy).epsilon(1e-12));
  }
}

TEST_CASE("validate reports the spec'd violation classes") {
  const std::vector<TrajectoryPoint> good = {{0.0, 0, 0, 1, 0},
                                             {1.0, 1, 0, 1, 0}};
  CHECK(validate_points(good).empty());

  const std::vector<TrajectoryPoint> fast = {{0.0, 0, 0, 10.0, 0}};
  const auto speed_violations = validate_points(fast);
  REQUIRE(speed_violations.size() == 1);
  CHECK(speed_violations[0].kind == TrajectoryViolation::Kind::kSpeedBound);
  CHECK(speed_violations[0].index == 0);

  const std::vector<TrajectoryPoint> decreasing = {{1.0, 0, 0, 0, 0},
                                                   {0.5, 1, 0, 0, 0}};
  const auto time_violations = validate_points(decreasing);
  REQUIRE(time_violations.size() == 1);
  CHECK(time_violations[0].kind ==
        TrajectoryViolation::Kind::kNonMonotonicTime);

  const std::vector<TrajectoryPoint> bad = {
      {0.0, 0, 0, 0, 0}, {1.0, std::nan(""), 0, 0, 0}};
  const auto finite_violations = validate_points(bad);
  REQUIRE(finite_violations.size() == 1);
  CHECK(finite_violations[0].kind == TrajectoryViolation::Kind::kNonFinite);
}

TEST_CASE("CSV round trip preserves every coordinate bitwise") {
  const Trajectory traj = random_trajectory(21, 15);
  const auto path = std::filesystem::temp_directory_path() /
                    "minifleet_traj_roundtrip.csv";
  save_trajectory_csv(path, traj);
  const Trajectory loaded = load_trajectory_csv(path);
  REQUIRE(loaded.size() == traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    CHECK(loaded.points()[i].t == traj.points()[i].t);
    CHECK(loaded.points()[i].x == traj.points()[i].x);
    CHECK(loaded.points()[i].y == traj.points()[i].y);
    CHECK(loaded.points()[i].vx == traj.points()[i].vx);
    CHECK(loaded.points()[i].vy == traj.points()[i].vy);
  }
  std::filesystem::remove(path);

  // Malformed rows name their line.
  const auto bad_path =
      std::filesystem::temp_directory_path() / "minifleet_traj_bad.csv";
  io::write_file(bad_path, "t,x,y,vx,vy\n0,0,0,0,0\n1,zzz,0,0,0\n");
  try {
    load_trajectory_csv(bad_path);
    FAIL("expected a parse error");
  } catch (const io::ParseError& e) {
    CHECK(e.line() == 3);
  }
  std::filesystem::remove(bad_path);
}

}  // namespace
}  // namespace minifleet
