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

#ifndef MINIFLEET_IDENT_IDENT_HPP_
#define MINIFLEET_IDENT_IDENT_HPP_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "minifleet/dynamics.hpp"
#include "minifleet/kernels/rollout.hpp"

namespace minifleet::ident {

/// One logged sample: external positioning fix, odometer speed and the
/// commands applied at that timestep.
struct MeasurementSample {
  double t{0.0};        // [s]
  double x_ips{0.0};    // [m]
  double y_ips{0.0};    // [m]
  double psi_ips{0.0};  // [rad]
  double v_odo{0.0};    // [m/s]
  double m{0.0};
  double d{0.0};
  double u{kNominalVoltage};  // [V]

  VehicleState as_state() const { return {x_ips, y_ips, psi_ips, v_odo}; }
  ControlInput input() const { return {m, d, u}; }
  bool all_finite() const;
};

/// Fixed-length window of consecutive samples at uniform spacing.
struct Experiment {
  std::vector<MeasurementSample> samples;
  double dt{kDefaultTimestep};
  int start_row{0};  // index of samples.front() in the source log
};

/// Integer-step delays of the three measurement/actuation paths.
struct DelayConfig {
  int ips_delay{0};        // positioning pose lags truth by this many steps
  int local_delay{0};      // odometer speed lag
  int actuation_delay{0};  // commands take effect this many steps later

  bool operator==(const DelayConfig&) const = default;
};

/// Weights of the quadratic pose error. The yaw term uses sin^2(dpsi/2) so
/// errors are periodic in 2*pi.
struct ErrorWeights {
  double pos_x{1.0};  // [1/m^2]
  double pos_y{1.0};  // [1/m^2]
  double yaw{1.0};    // dimensionless
  double speed{1.0};  // [s^2/m^2]
};

/// E = wx*dx^2 + wy*dy^2 + wpsi*sin^2(dpsi/2) + wv*dv^2.
double pose_error(const VehicleState& sim, const VehicleState& measured,
                  const ErrorWeights& weights);

struct SliceReport {
  struct DroppedWindow {
    int window_index;
    int start_row;
    std::string reason;
  };
  std::vector<DroppedWindow> dropped;
  int tail_samples_dropped{0};
};

/// Cuts the log into consecutive non-overlapping windows of n_window
/// samples. Windows whose internal spacing deviates from expected_dt by more
/// than 1e-6 s are discarded and reported; the trailing remainder is
/// dropped.
std::vector<Experiment> slice_experiments(
    std::span<const MeasurementSample> log, int n_window,
    double expected_dt = kDefaultTimestep, SliceReport* report = nullptr);

/// Delay-aligned window: measured[j] and inputs[j] both refer to the same
/// physical timestep. The positioning pose logged at row k reflects the true
/// pose at k - ips_delay, the odometer at k - local_delay, and the command
/// logged at row k takes effect at k + actuation_delay; the window is
/// trimmed to the rows where all three are defined.
struct AlignedExperiment {
  std::vector<VehicleState> measured;
  std::vector<ControlInput> inputs;
  double dt{kDefaultTimestep};
  double t0{0.0};

  std::size_t size() const { return measured.size(); }
};

/// Throws std::invalid_argument when the trimmed window has fewer than two
/// samples.
AlignedExperiment apply_delays(const Experiment& experiment,
                               const DelayConfig& delays);

enum class InitMode {
  kMeasured,  // window initial state fixed to the measured state
  kFree,      // window initial state is part of the decision vector
};

/// Objective value that a delay combination would be scored with when every
/// simulation stays finite; non-finite rollouts are mapped to this sentinel.
inline constexpr double kDivergencePenalty = 1e12;

struct ObjectiveDiagnostics {
  bool penalty_hit{false};
  std::vector<double> window_objectives;
};

/// Single-shooting objective of Eq-style windowed identification: each
/// window is simulated forward from its initial state with the aligned
/// inputs and scored sample-by-sample with pose_error. With kFree,
/// init_overrides supplies the window initial states (measured states are
/// used when absent).
double objective(std::span<const Experiment> experiments,
                 const ModelParams& params, const DelayConfig& delays,
                 const ErrorWeights& weights,
                 InitMode init_mode = InitMode::kMeasured,
                 std::span<const VehicleState> init_overrides = {},
                 ObjectiveDiagnostics* diagnostics = nullptr,
                 kernels::Backend backend = kernels::Backend::kAuto);

/// Same objective on pre-aligned windows.
double objective_aligned(std::span<const AlignedExperiment> aligned,
                         const ModelParams& params,
                         const ErrorWeights& weights,
                         std::span<const VehicleState> init_overrides = {},
                         ObjectiveDiagnostics* diagnostics = nullptr,
                         kernels::Backend backend = kernels::Backend::kAuto);

}  // namespace minifleet::ident

#endif  // MINIFLEET_IDENT_IDENT_HPP_
