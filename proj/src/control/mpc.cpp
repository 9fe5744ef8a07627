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

#include "minifleet/control/mpc.hpp"

#include <algorithm>
#include <cmath>

namespace minifleet::control {

namespace {

struct ReferencePoint {
  double x, y, psi, v;
  double yaw_gate;  // 0 at standstill, 1 at speed
};

// Cost of one input sequence: rolls the model through the horizon (one
// kernel lane) and accumulates tracking + input penalties.
class CostEvaluator {
 public:
  CostEvaluator(const MpcConfig& cfg, const ModelParams& model,
                const VehicleState& z0, std::vector<ReferencePoint> refs,
                const DirectInput& previous_command, double battery_voltage)
      : cfg_(cfg),
        refs_(std::move(refs)),
        prev_(previous_command),
        voltage_(battery_voltage) {
    batch_.dt = cfg.dt;
    batch_.resize(cfg.horizon);
    for (int lane = 0; lane < kernels::kLaneCount; ++lane) {
      batch_.set_initial(lane, z0);
      batch_.set_params(lane, model);
    }
  }

  // Evaluates up to kLaneCount candidate sequences at once.
  void evaluate(std::span<const std::vector<DirectInput>> candidates,
                std::span<double> costs) {
    const int n = static_cast<int>(candidates.size());
    for (int lane = 0; lane < kernels::kLaneCount; ++lane) {
      const auto& seq = candidates[std::min(lane, n - 1)];
      for (int k = 0; k < cfg_.horizon; ++k) {
        batch_.set_input(k, lane, {seq[k].m, seq[k].d, voltage_});
      }
    }
    kernels::rollout(batch_, cfg_.backend);
    for (int lane = 0; lane < n; ++lane) {
      costs[lane] = accumulate(candidates[lane], lane);
    }
  }

  double evaluate_one(const std::vector<DirectInput>& candidate) {
    double cost = 0.0;
    evaluate(std::span<const std::vector<DirectInput>>(&candidate, 1),
             std::span<double>(&cost, 1));
    return cost;
  }

 private:
  double accumulate(const std::vector<DirectInput>& seq, int lane) const {
    double cost = 0.0;
    for (int k = 0; k < cfg_.horizon; ++k) {
      const VehicleState z = batch_.state_after(k, lane);
      const ReferencePoint& ref = refs_[k];
      const double dx = z.x - ref.x;
      const double dy = z.y - ref.y;
      const double chord = 2.0 * std::sin(0.5 * (z.psi - ref.psi));
      const double dv = z.v - ref.v;
      cost += cfg_.weight_position * (dx * dx + dy * dy);
      cost += cfg_.weight_yaw * ref.yaw_gate * chord * chord;
      cost += cfg_.weight_speed * dv * dv;
      const double pm = k == 0 ? prev_.m : seq[k - 1].m;
      const double pd = k == 0 ? prev_.d : seq[k - 1].d;
      const double rm = seq[k].m - pm;
      const double rd = seq[k].d - pd;
      cost += cfg_.weight_input * (seq[k].m * seq[k].m + seq[k].d * seq[k].d);
      cost += cfg_.weight_input_rate * (rm * rm + rd * rd);
    }
    return std::isfinite(cost) ? cost : std::numeric_limits<double>::infinity();
  }

  const MpcConfig& cfg_;
  std::vector<ReferencePoint> refs_;
  DirectInput prev_;
  double voltage_;
  mutable kernels::RolloutBatch batch_;
};

std::vector<ReferencePoint> sample_references(const Trajectory& trajectory,
                                              double t0, int horizon,
                                              double dt) {
  std::vector<ReferencePoint> refs;
  refs.reserve(horizon);
  for (int k = 0; k < horizon; ++k) {
    const ReferenceSample s = trajectory.interpolate(t0 + (k + 1) * dt);
    ReferencePoint ref{};
    ref.x = s.x;
    ref.y = s.y;
    ref.v = std::hypot(s.vx, s.vy);
    ref.psi = ref.v > 1e-9 ? std::atan2(s.vy, s.vx) : 0.0;
    ref.yaw_gate = (ref.v * ref.v) / (ref.v * ref.v + 0.01);
    refs.push_back(ref);
  }
  return refs;
}

}  // namespace

TrackingMpc::TrackingMpc(const MpcConfig& config, const ModelParams& model)
    : cfg_(config), model_(model) {
  if (cfg_.horizon < 1) {
    throw std::invalid_argument("mpc horizon must be at least 1");
  }
}

std::vector<DirectInput> TrackingMpc::solve(
    const VehicleState& z0, double t0, const Trajectory& trajectory,
    const DirectInput& previous_command,
    std::span<const DirectInput> warm_start, double battery_voltage,
    MpcDiagnostics* diagnostics) {
  const int horizon = cfg_.horizon;
  const int dims = 2 * horizon;

  std::vector<DirectInput> current(horizon, DirectInput{});
  for (int k = 0; k < horizon && k < static_cast<int>(warm_start.size()); ++k) {
    current[k] = warm_start[k];
  }
  auto clamp_seq = [&](std::vector<DirectInput>& seq) {
    for (DirectInput& in : seq) {
      in.m = std::clamp(in.m, -cfg_.bound_m, cfg_.bound_m);
      in.d = std::clamp(in.d, -cfg_.bound_d, cfg_.bound_d);
    }
  };
  clamp_seq(current);

  CostEvaluator evaluator(cfg_, model_,  z0,
                          sample_references(trajectory, t0, horizon, cfg_.dt),
                          previous_command, battery_voltage);

  double cost = evaluator.evaluate_one(current);
  if (diagnostics) {
    diagnostics->cost_initial = cost;
    diagnostics->cost_history.push_back(cost);
  }
  if (!std::isfinite(cost)) {
    if (diagnostics) {
      diagnostics->safe_stop = true;
      diagnostics->cost_final = cost;
    }
    return std::vector<DirectInput>(horizon, DirectInput{});
  }

  std::vector<double> gradient(dims, 0.0);
  double step_size = cfg_.initial_step;
  int iterations = 0;

  std::vector<std::vector<DirectInput>> candidates;
  std::vector<double> costs;
  for (int it = 0; it < cfg_.max_iterations; ++it) {
    // Forward-difference gradient, batched through the rollout lanes.
    candidates.clear();
    for (int j = 0; j < dims; ++j) {
      std::vector<DirectInput> perturbed = current;
      if (j % 2 == 0) {
        perturbed[j / 2].m += cfg_.fd_step;
      } else {
        perturbed[j / 2].d += cfg_.fd_step;
      }
      candidates.push_back(std::move(perturbed));
    }
    costs.assign(dims, 0.0);
    for (int j = 0; j < dims; j += kernels::kLaneCount) {
      const int group = std::min<int>(kernels::kLaneCount, dims - j);
      evaluator.evaluate(
          std::span<const std::vector<DirectInput>>(&candidates[j], group),
          std::span<double>(&costs[j], group));
    }
    for (int j = 0; j < dims; ++j) {
      gradient[j] = (costs[j] - cost) / cfg_.fd_step;
    }

    // Projected step with Armijo backtracking on the projection.
    bool accepted = false;
    double alpha = step_size;
    for (int attempt = 0; attempt < 16; ++attempt) {
      std::vector<DirectInput> trial = current;
      for (int k = 0; k < horizon; ++k) {
        trial[k].m -= alpha * gradient[2 * k];
        trial[k].d -= alpha * gradient[2 * k + 1];
      }
      clamp_seq(trial);
      double projected_norm2 = 0.0;
      for (int k = 0; k < horizon; ++k) {
        const double dm = trial[k].m - current[k].m;
        const double dd = trial[k].d - current[k].d;
        projected_norm2 += dm * dm + dd * dd;
      }
      if (projected_norm2 < 1e-20) break;
      const double trial_cost = evaluator.evaluate_one(trial);
      if (std::isfinite(trial_cost) &&
          trial_cost <=
              cost - cfg_.armijo_constant / alpha * projected_norm2) {
        current = std::move(trial);
        cost = trial_cost;
        accepted = true;
        if (diagnostics) diagnostics->cost_history.push_back(cost);
        break;
      }
      alpha *= cfg_.armijo_shrink;
    }
    ++iterations;
    if (!accepted) break;
    step_size = std::min(alpha * cfg_.step_growth,
                         cfg_.initial_step * 16.0);
  }

  if (diagnostics) {
    diagnostics->iterations = iterations;
    diagnostics->cost_final = cost;
  }
  return current;
}

ControlInput TrackingMpc::step(const StateEstimate& estimate,
                               const Trajectory& trajectory,
                               std::span<const DirectInput> pending,
                               double battery_voltage,
                               MpcDiagnostics* diagnostics) {
  // Delay compensation: apply the in-flight commands before the horizon.
  VehicleState z = estimate.state;
  bool finite = z.all_finite();
  if (finite) {
    try {
      for (const DirectInput& cmd : pending) {
        z = euler_step(z, {cmd.m, cmd.d, battery_voltage}, model_, cfg_.dt);
      }
    } catch (const IntegrationError&) {
      finite = false;
    }
  }
  if (!finite) {
    if (diagnostics) diagnostics->safe_stop = true;
    plan_.clear();
    return {0.0, 0.0, battery_voltage};
  }
  const double t0 = estimate.t + static_cast<double>(pending.size()) * cfg_.dt;

  // Warm start: previous plan shifted by one step, last entry repeated.
  std::vector<DirectInput> warm;
  if (!plan_.empty()) {
    warm.assign(plan_.begin() + 1, plan_.end());
    warm.push_back(plan_.back());
  }
  const DirectInput previous =
      pending.empty() ? (plan_.empty() ? DirectInput{} : plan_.front())
                      : pending.back();
  plan_ = solve(z, t0, trajectory, previous, warm, battery_voltage,
                diagnostics);
  const DirectInput first = plan_.front();
  return {std::clamp(first.m, -cfg_.bound_m, cfg_.bound_m),
          std::clamp(first.d, -cfg_.bound_d, cfg_.bound_d), battery_voltage};
}

double steady_state_motor(double v_target, double battery_voltage,
                          const ModelParams& p) {
  const double gain = p.p6 + p.p7 * battery_voltage;
  if (!(gain > 0.0) || v_target == 0.0 || !(p.p8 > 0.0)) return 0.0;
  const double magnitude = std::pow(-p.p5 * std::abs(v_target) / gain,
                                    1.0 / p.p8);
  return v_target > 0.0 ? magnitude : -magnitude;
}

double steady_state_speed(double m, double battery_voltage,
                          const ModelParams& p) {
  const double mc = clamp_command(m);
  const double gain = p.p6 + p.p7 * battery_voltage;
  double motor = 0.0;
  if (mc > 0.0) {
    motor = std::pow(mc, p.p8);
  } else if (mc < 0.0) {
    motor = -std::pow(-mc, p.p8);
  }
  return -gain * motor / p.p5;
}

}  // namespace minifleet::control
