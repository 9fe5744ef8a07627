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

#include "minifleet/ident/ident.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "minifleet/ident/residuals.hpp"

namespace minifleet::ident {

bool MeasurementSample::all_finite() const {
  return std::isfinite(t) && std::isfinite(x_ips) && std::isfinite(y_ips) &&
         std::isfinite(psi_ips) && std::isfinite(v_odo) && std::isfinite(m) &&
         std::isfinite(d) && std::isfinite(u);
}

double pose_error(const VehicleState& sim, const VehicleState& measured,
                  const ErrorWeights& weights) {
  const double dx = sim.x - measured.x;
  const double dy = sim.y - measured.y;
  const double sin_half = std::sin(0.5 * (sim.psi - measured.psi));
  const double dv = sim.v - measured.v;
  return weights.pos_x * dx * dx + weights.pos_y * dy * dy +
         weights.yaw * sin_half * sin_half + weights.speed * dv * dv;
}

std::vector<Experiment> slice_experiments(
    std::span<const MeasurementSample> log, int n_window, double expected_dt,
    SliceReport* report) {
  if (n_window < 2) {
    throw std::invalid_argument("window length must be at least 2 samples");
  }
  std::vector<Experiment> experiments;
  if (log.empty()) return experiments;

  const int windows = static_cast<int>(log.size()) / n_window;
  if (report) {
    report->tail_samples_dropped =
        static_cast<int>(log.size()) - windows * n_window;
  }
  for (int w = 0; w < windows; ++w) {
    const int start = w * n_window;
    bool uniform = true;
    std::string reason;
    for (int k = 1; k < n_window; ++k) {
      const double gap = log[start + k].t - log[start + k - 1].t;
      if (std::abs(gap - expected_dt) > 1e-6) {
        uniform = false;
        reason = "spacing " + std::to_string(gap) + " s at sample " +
                 std::to_string(start + k) + " deviates from " +
                 std::to_string(expected_dt) + " s";
        break;
      }
    }
    if (!uniform) {
      if (report) report->dropped.push_back({w, start, reason});
      continue;
    }
    Experiment exp;
    exp.samples.assign(log.begin() + start, log.begin() + start + n_window);
    exp.dt = expected_dt;
    exp.start_row = start;
    experiments.push_back(std::move(exp));
  }
  return experiments;
}

AlignedExperiment apply_delays(const Experiment& experiment,
                               const DelayConfig& delays) {
  if (delays.ips_delay < 0 || delays.local_delay < 0 ||
      delays.actuation_delay < 0) {
    throw std::invalid_argument("delays must be non-negative");
  }
  const int n = static_cast<int>(experiment.samples.size());
  const int sensor_trim = std::max(delays.ips_delay, delays.local_delay);
  const int length = n - delays.actuation_delay - sensor_trim;
  if (length < 2) {
    throw std::invalid_argument(
        "aligned window has fewer than two samples (window " +
        std::to_string(n) + ", delays " + std::to_string(delays.ips_delay) +
        "/" + std::to_string(delays.local_delay) + "/" +
        std::to_string(delays.actuation_delay) + ")");
  }
  AlignedExperiment aligned;
  aligned.dt = experiment.dt;
  aligned.measured.reserve(length);
  aligned.inputs.reserve(length);
  const auto& rows = experiment.samples;
  // Physical timestep i (relative to the window) runs over the rows where
  // every shifted channel exists.
  const int i0 = delays.actuation_delay;
  aligned.t0 = rows[i0].t;
  for (int j = 0; j < length; ++j) {
    const int i = i0 + j;
    const MeasurementSample& pose_row = rows[i + delays.ips_delay];
    const MeasurementSample& speed_row = rows[i + delays.local_delay];
    const MeasurementSample& input_row = rows[i - delays.actuation_delay];
    aligned.measured.push_back({pose_row.x_ips, pose_row.y_ips,
                                pose_row.psi_ips, speed_row.v_odo});
    aligned.inputs.push_back(input_row.input());
  }
  return aligned;
}

double objective_aligned(std::span<const AlignedExperiment> aligned,
                         const ModelParams& params,
                         const ErrorWeights& weights,
                         std::span<const VehicleState> init_overrides,
                         ObjectiveDiagnostics* diagnostics,
                         kernels::Backend backend) {
  if (aligned.empty()) {
    throw std::invalid_argument("objective needs at least one experiment");
  }
  if (!init_overrides.empty() && init_overrides.size() != aligned.size()) {
    throw std::invalid_argument(
        "init overrides must match the experiment count");
  }
  return detail::batched_objective(aligned, params, weights, init_overrides,
                                   diagnostics, backend);
}

double objective(std::span<const Experiment> experiments,
                 const ModelParams& params, const DelayConfig& delays,
                 const ErrorWeights& weights, InitMode init_mode,
                 std::span<const VehicleState> init_overrides,
                 ObjectiveDiagnostics* diagnostics,
                 kernels::Backend backend) {
  if (experiments.empty()) {
    throw std::invalid_argument("objective needs at least one experiment");
  }
  std::vector<AlignedExperiment> aligned;
  aligned.reserve(experiments.size());
  for (const Experiment& exp : experiments) {
    aligned.push_back(apply_delays(exp, delays));
  }
  if (init_mode == InitMode::kMeasured) {
    init_overrides = {};
  }
  return objective_aligned(aligned, params, weights, init_overrides,
                           diagnostics, backend);
}

}  // namespace minifleet::ident
