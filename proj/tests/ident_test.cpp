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

#include <cmath>
#include <filesystem>

#include <doctest.h>

#include "minifleet/ident/estimate.hpp"
#include "minifleet/ident/log_io.hpp"
#include "minifleet/io/csv.hpp"
#include "minifleet/labsim/ident_log.hpp"

namespace minifleet::ident {
namespace {

std::vector<MeasurementSample> synthetic_log(double duration, double noise_pos,
                                             double noise_yaw, double noise_v,
                                             DelayConfig delays = {1, 0, 5},
                                             std::uint64_t seed = 3) {
  labsim::IdentLogOptions options;
  options.duration = duration;
  options.delays = delays;
  options.noise_pos_sigma = noise_pos;
  options.noise_yaw_sigma = noise_yaw;
  options.noise_speed_sigma = noise_v;
  options.seed = seed;
  return labsim::generate_ident_log(ModelParams::reference_fit(), options);
}

bool params_equal(const ModelParams& a, const ModelParams& b) {
  return a.to_array() == b.to_array();
}

TEST_CASE("pose error: zero, periodicity and weights") {
  const ErrorWeights w{};
  const VehicleState s{1.0, 2.0, 0.5, 1.5};
  CHECK(pose_error(s, s, w) == 0.0);

  VehicleState wrapped = s;
  wrapped.psi += 2.0 * M_PI;
  CHECK(pose_error(wrapped, s, w) < 1e-25);

  VehicleState opposite = s;
  opposite.psi += M_PI;
  CHECK(pose_error(opposite, s, w) == doctest::Approx(1.0).epsilon(1e-12));

  // Only-x weights ignore every other channel.
  const ErrorWeights only_x{1.0, 0.0, 0.0, 0.0};
  VehicleState off = s;
  off.y += 5.0;
  off.psi += 1.0;
  off.v += 2.0;
  CHECK(pose_error(off, s, only_x) == 0.0);
  off.x += 2.0;
  CHECK(pose_error(off, s, only_x) == doctest::Approx(4.0));
}

TEST_CASE("slice: windowing, tail drop and gap discard") {
  std::vector<MeasurementSample> log;
  for (int k = 0; k < 250; ++k) {
    MeasurementSample s;
    s.t = k * kDefaultTimestep;
    log.push_back(s);
  }
  SliceReport report;
  auto experiments = slice_experiments(log, 100, kDefaultTimestep, &report);
  CHECK(experiments.size() == 2);
  CHECK(report.tail_samples_dropped == 50);
  CHECK(experiments[0].start_row == 0);
  CHECK(experiments[1].start_row == 100);
  CHECK(experiments[0].samples.size() == 100);
  // One 100-sample window spans 2 s of data.
  CHECK(experiments[0].samples.back().t - experiments[0].samples.front().t ==
        doctest::Approx(1.98).epsilon(1e-12));

  // A missing sample inside window 1 discards only that window.
  std::vector<MeasurementSample> gappy = log;
  gappy.erase(gappy.begin() + 150);
  SliceReport gap_report;
  auto gapped = slice_experiments(gappy, 100, kDefaultTimestep, &gap_report);
  CHECK(gapped.size() == 1);
  REQUIRE(gap_report.dropped.size() == 1);
  CHECK(gap_report.dropped[0].window_index == 1);

  CHECK(slice_experiments({}, 100).empty());
  CHECK_THROWS_AS(slice_experiments(log, 1), std::invalid_argument);

  const std::vector<MeasurementSample> exact(log.begin(), log.begin() + 100);
  CHECK(slice_experiments(exact, 100).size() == 1);
}

TEST_CASE("apply_delays: identity, trimming and exact channel mapping") {
  Experiment experiment;
  experiment.dt = kDefaultTimestep;
  for (int k = 0; k < 10; ++k) {
    MeasurementSample s;
    s.t = k * kDefaultTimestep;
    s.x_ips = 1000.0 + k;
    s.y_ips = 2000.0 + k;
    s.psi_ips = 0.001 * k;
    s.v_odo = 3000.0 + k;
    s.m = k;
    s.d = -k;
    s.u = 7.0 + 0.01 * k;
    experiment.samples.push_back(s);
  }

  SUBCASE("zero delays are the identity") {
    const AlignedExperiment aligned = apply_delays(experiment, {0, 0, 0});
    REQUIRE(aligned.size() == 10);
    for (int j = 0; j < 10; ++j) {
      CHECK(aligned.measured[j].x == 1000.0 + j);
      CHECK(aligned.measured[j].v == 3000.0 + j);
      CHECK(aligned.inputs[j].m == j);
    }
  }

  SUBCASE("shifts land on the right rows") {
    const DelayConfig delays{1, 0, 2};
    const AlignedExperiment aligned = apply_delays(experiment, delays);
    REQUIRE(aligned.size() == 10 - 2 - 1);
    for (std::size_t j = 0; j < aligned.size(); ++j) {
      const int i = 2 + static_cast<int>(j);  // physical step in the window
      CHECK(aligned.measured[j].x == 1000.0 + i + 1);  // pose logged 1 late
      CHECK(aligned.measured[j].v == 3000.0 + i);      // odometer on time
      CHECK(aligned.inputs[j].m == i - 2);  // command takes effect 2 late
    }
  }

  SUBCASE("window length follows the max-shift rule") {
    Experiment wide;
    wide.dt = kDefaultTimestep;
    for (int k = 0; k < 100; ++k) {
      MeasurementSample s;
      s.t = k * kDefaultTimestep;
      wide.samples.push_back(s);
    }
    CHECK(apply_delays(wide, {1, 0, 5}).size() == 94);
  }

  SUBCASE("over-long or negative delays are an error") {
    CHECK_THROWS_AS(apply_delays(experiment, {0, 0, 9}),
                    std::invalid_argument);
    CHECK_THROWS_AS(apply_delays(experiment, {-1, 0, 0}),
                    std::invalid_argument);
  }
}

TEST_CASE("objective: generator round trip, sensitivity and weights") {
  const ModelParams truth = ModelParams::reference_fit();
  const DelayConfig delays{1, 0, 5};
  const auto log = synthetic_log(8.0, 0.0, 0.0, 0.0, delays);
  const auto experiments = slice_experiments(log, 100);
  REQUIRE(experiments.size() == 4);

  const ErrorWeights w{};
  const double at_truth = objective(experiments, truth, delays, w);
  CHECK(at_truth <= 1e-12);

  ModelParams bumped = truth;
  bumped.p4 *= 1.1;
  CHECK(objective(experiments, bumped, delays, w) > at_truth);

  // With only the x weight, yaw and speed errors are invisible.
  ModelParams yaw_off = truth;
  yaw_off.p10 += 0.5;
  const ErrorWeights only_x{1.0, 0.0, 0.0, 0.0};
  CHECK(objective(experiments, yaw_off, delays, w) >
        objective(experiments, yaw_off, delays, only_x));

  // Wrong delays leave a strictly positive residual.
  CHECK(objective(experiments, truth, {0, 0, 5}, w) > 1e-6);
  CHECK(objective(experiments, truth, {1, 0, 4}, w) > 1e-6);

  // A divergent parameter set trips the penalty sentinel.
  ModelParams unstable = truth;
  unstable.p5 = 80.0;
  ObjectiveDiagnostics diag;
  const double penalized = objective(experiments, unstable, delays, w,
                                     InitMode::kMeasured, {}, &diag);
  CHECK(penalized == kDivergencePenalty);
  CHECK(diag.penalty_hit);
}

TEST_CASE("objective is invariant to adding 2*pi to all measured yaws") {
  const ModelParams truth = ModelParams::reference_fit();
  const DelayConfig delays{0, 0, 0};
  auto log = synthetic_log(4.0, 0.002, 0.005, 0.005, delays);
  const double base =
      objective(slice_experiments(log, 100), truth, delays, {});
  for (auto& sample : log) sample.psi_ips += 2.0 * M_PI;
  const double wrapped =
      objective(slice_experiments(log, 100), truth, delays, {});
  CHECK(wrapped == doctest::Approx(base).epsilon(1e-9));
}

TEST_CASE("noise-free recovery from the default initial guess") {
  const ModelParams truth = ModelParams::reference_fit();
  const DelayConfig delays{1, 0, 5};
  const auto log = synthetic_log(20.0, 0.0, 0.0, 0.0, delays);
  const auto experiments = slice_experiments(log, 100);
  REQUIRE(experiments.size() == 10);

  const FitOptions options;
  const FitResult fit =
      estimate_parameters(experiments, delays, ModelParams{}, options);

  CHECK(fit.objective <= 1e-10);
  const auto fitted = fit.params.to_array();
  const auto expected = truth.to_array();
  for (int i = 0; i < 10; ++i) {
    CHECK(std::abs(fitted[i] - expected[i]) <=
          1e-4 * std::max(1.0, std::abs(expected[i])));
  }
  // The reported objective re-evaluates to itself on the same data.
  const double check =
      objective(experiments, fit.params, delays, options.weights);
  CHECK(fit.objective == doctest::Approx(check).epsilon(1e-9));

  double sum = 0.0;
  for (double wobj : fit.window_objectives) sum += wobj;
  CHECK(sum == doctest::Approx(fit.objective).epsilon(1e-12));
}

TEST_CASE("starting at the optimum terminates immediately") {
  const ModelParams truth = ModelParams::reference_fit();
  const DelayConfig delays{1, 0, 5};
  const auto log = synthetic_log(6.0, 0.0, 0.0, 0.0, delays);
  const auto experiments = slice_experiments(log, 100);

  const FitResult fit = estimate_parameters(experiments, delays, truth, {});
  CHECK(fit.diagnostics.iterations <= 2);
  CHECK(fit.diagnostics.termination == "gradient_tol");
  const auto fitted = fit.params.to_array();
  const auto expected = truth.to_array();
  for (int i = 0; i < 10; ++i) {
    CHECK(std::abs(fitted[i] - expected[i]) <= 1e-6);
  }
}

TEST_CASE("accepted objectives never increase; runs are bitwise equal") {
  const DelayConfig delays{1, 0, 5};
  const auto log = synthetic_log(12.0, 0.01, 0.017, 0.02, delays, 11);
  const auto experiments = slice_experiments(log, 100);

  const FitResult a =
      estimate_parameters(experiments, delays, ModelParams{}, {});
  const FitResult b =
      estimate_parameters(experiments, delays, ModelParams{}, {});

  for (std::size_t i = 1; i < a.diagnostics.objective_history.size(); ++i) {
    CHECK(a.diagnostics.objective_history[i] <=
          a.diagnostics.objective_history[i - 1]);
  }
  CHECK(params_equal(a.params, b.params));
  CHECK(a.objective == b.objective);
  CHECK(a.diagnostics.objective_history == b.diagnostics.objective_history);
  CHECK(a.diagnostics.iterations == b.diagnostics.iterations);
}

TEST_CASE("free-init mode recovers the parameters too") {
  const ModelParams truth = ModelParams::reference_fit();
  const DelayConfig delays{0, 0, 0};
  const auto log = synthetic_log(8.0, 0.0, 0.0, 0.0, delays);
  const auto experiments = slice_experiments(log, 100);

  FitOptions options;
  options.init_mode = InitMode::kFree;
  const FitResult fit =
      estimate_parameters(experiments, delays, ModelParams{}, options);
  CHECK(fit.fitted_inits.size() == experiments.size());
  CHECK(fit.objective <= 1e-9);
  const auto fitted = fit.params.to_array();
  const auto expected = truth.to_array();
  for (int i = 0; i < 10; ++i) {
    CHECK(std::abs(fitted[i] - expected[i]) <=
          1e-3 * std::max(1.0, std::abs(expected[i])));
  }
}

TEST_CASE("translating measurements leaves the fitted parameters unchanged") {
  const DelayConfig delays{0, 0, 0};
  const auto log = synthetic_log(8.0, 0.0, 0.0, 0.0, delays);
  const FitResult base =
      estimate_parameters(slice_experiments(log, 100), delays, ModelParams{},
                          {});

  auto shifted_log = log;
  for (auto& s : shifted_log) {
    s.x_ips += 1.7;
    s.y_ips -= 2.4;
  }
  const FitResult moved = estimate_parameters(
      slice_experiments(shifted_log, 100), delays, ModelParams{}, {});

  const auto pa = base.params.to_array();
  const auto pb = moved.params.to_array();
  for (int i = 0; i < 10; ++i) {
    CHECK(std::abs(pa[i] - pb[i]) <= 1e-6 * std::max(1.0, std::abs(pa[i])));
  }
}

TEST_CASE("zero excitation reports every parameter as unidentifiable") {
  std::vector<MeasurementSample> log;
  for (int k = 0; k < 100; ++k) {
    MeasurementSample s;
    s.t = k * kDefaultTimestep;
    log.push_back(s);  // vehicle at rest, zero commands
  }
  const auto experiments = slice_experiments(log, 100);
  const FitResult fit =
      estimate_parameters(experiments, {0, 0, 0}, ModelParams{}, {});
  CHECK(fit.objective == 0.0);
  CHECK(fit.diagnostics.unidentifiable_params.size() == 10);
}

TEST_CASE("delay grid search") {
  const DelayConfig truth_delays{1, 0, 5};
  const auto log = synthetic_log(12.0, 0.0, 0.0, 0.0, truth_delays);
  const auto experiments = slice_experiments(log, 100);

  SUBCASE("single-cell grid equals a plain fit") {
    DelayRanges cell;
    cell.ips_min = cell.ips_max = 1;
    cell.local_min = cell.local_max = 0;
    cell.actuation_min = cell.actuation_max = 5;
    const FitResult grid =
        delay_grid_search(experiments, cell, ModelParams{}, {});
    const FitResult direct =
        estimate_parameters(experiments, truth_delays, ModelParams{}, {});
    CHECK(grid.objective == direct.objective);
    CHECK(params_equal(grid.params, direct.params));
  }

  SUBCASE("recovers the true delays and dominates every evaluated cell") {
    DelayRanges ranges;
    ranges.ips_min = 0;
    ranges.ips_max = 2;
    ranges.local_min = 0;
    ranges.local_max = 1;
    ranges.actuation_min = 3;
    ranges.actuation_max = 7;
    GridReport report;
    const FitResult best =
        delay_grid_search(experiments, ranges, ModelParams{}, {}, &report);
    CHECK(best.delays == truth_delays);
    CHECK(report.cells.size() == 3 * 2 * 5);
    for (const GridCell& cell : report.cells) {
      if (cell.solved) CHECK(best.objective <= cell.objective);
    }
  }

  SUBCASE("exact ties break lexicographically on (actuation, ips, local)") {
    // A rest log carries no information: every cell fits with objective 0.
    std::vector<MeasurementSample> rest;
    for (int k = 0; k < 100; ++k) {
      MeasurementSample s;
      s.t = k * kDefaultTimestep;
      rest.push_back(s);
    }
    const auto rest_experiments = slice_experiments(rest, 100);
    DelayRanges ranges;
    ranges.ips_min = 0;
    ranges.ips_max = 1;
    ranges.local_min = 0;
    ranges.local_max = 1;
    ranges.actuation_min = 0;
    ranges.actuation_max = 1;
    const FitResult best =
        delay_grid_search(rest_experiments, ranges, ModelParams{}, {});
    CHECK(best.objective == 0.0);
    CHECK(best.delays == DelayConfig{0, 0, 0});
    CHECK(best.diagnostics.tie_break_applied);
  }

  SUBCASE("a grid where every cell fails raises an aggregate error") {
    DelayRanges impossible;
    impossible.ips_min = impossible.ips_max = 0;
    impossible.local_min = impossible.local_max = 0;
    impossible.actuation_min = impossible.actuation_max = 99;
    CHECK_THROWS_AS(
        delay_grid_search(experiments, impossible, ModelParams{}, {}),
        std::runtime_error);
  }
}

TEST_CASE("measurement log file round trip and error reporting") {
  const auto dir = std::filesystem::temp_directory_path();
  const auto path = dir / "minifleet_ident_log.csv";

  const auto log = synthetic_log(2.0, 0.001, 0.001, 0.001);
  save_measurement_log(path, log);
  const auto loaded = load_measurement_log(path);
  REQUIRE(loaded.size() == log.size());
  for (std::size_t i = 0; i < log.size(); ++i) {
    CHECK(loaded[i].t == log[i].t);
    CHECK(loaded[i].x_ips == log[i].x_ips);
    CHECK(loaded[i].v_odo == log[i].v_odo);
    CHECK(loaded[i].u == log[i].u);
  }
  std::filesystem::remove(path);

  const auto bad = dir / "minifleet_ident_bad.csv";
  io::write_file(bad,
                 "t,x_ips,y_ips,psi_ips,v_odo,m,d,u\n"
                 "0,0,0,0,0,0,0,7.4\n"
                 "0.02,abc,0,0,0,0,0,7.4\n");
  try {
    load_measurement_log(bad);
    FAIL("expected a parse error");
  } catch (const io::ParseError& e) {
    CHECK(e.line() == 3);
  }

  io::write_file(bad,
                 "t,x_ips,y_ips,psi_ips,v_odo,m,d,u\n"
                 "0.04,0,0,0,0,0,0,7.4\n"
                 "0.02,0,0,0,0,0,0,7.4\n");
  CHECK_THROWS_AS(load_measurement_log(bad), io::ParseError);

  io::write_file(bad,
                 "t,x_ips,y_ips,psi_ips,v_odo,m,d,u\n"
                 "0,1,2,0.1,0.5,0.2,-0.1,7.4\n"
                 "0.02,1.1,2,0.1,0.5,0.2,-0.1,7.4\n"
                 "0.04,1.2,2,0.1,0.5,0.2,-0.1,7.4\n");
  CHECK(load_measurement_log(bad).size() == 3);
  std::filesystem::remove(bad);
}

TEST_CASE("fit report JSON carries params, delays and the options echo") {
  const auto log = synthetic_log(4.0, 0.0, 0.0, 0.0, {1, 0, 5});
  const auto experiments = slice_experiments(log, 100);
  const FitOptions options;
  const FitResult fit = estimate_parameters(
      experiments, {1, 0, 5}, ModelParams::reference_fit(), options);
  const nlohmann::json report = fit_report_json(fit, options);
  CHECK(report["params"]["p"].size() == 10);
  CHECK(report["delays"]["actuation"] == 5);
  CHECK(report["options"]["max_iterations"] == 200);
  CHECK(report.contains("window_objectives"));

  const auto path =
      std::filesystem::temp_directory_path() / "minifleet_fit.json";
  write_fit_report(path, fit, options);
  const ModelParams reloaded = load_model_params(path);
  CHECK(params_equal(reloaded, fit.params));
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace minifleet::ident
