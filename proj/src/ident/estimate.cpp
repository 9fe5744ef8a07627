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

#include "minifleet/ident/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "minifleet/ident/residuals.hpp"

namespace minifleet::ident {

namespace detail {

namespace {

void fill_shared_inputs(kernels::RolloutBatch& batch,
                        const AlignedExperiment& window) {
  const int steps = static_cast<int>(window.size()) - 1;
  for (int k = 0; k < steps; ++k) {
    for (int lane = 0; lane < kernels::kLaneCount; ++lane) {
      batch.set_input(k, lane, window.inputs[k]);
    }
  }
}

// Residuals of one simulated state against one measured state; returns
// whether all four entries are finite.
bool emit_sample_residuals(const VehicleState& sim, const VehicleState& meas,
                           const ErrorWeights& w, double* out) {
  out[0] = std::sqrt(w.pos_x) * (sim.x - meas.x);
  out[1] = std::sqrt(w.pos_y) * (sim.y - meas.y);
  out[2] = std::sqrt(w.yaw) * std::sin(0.5 * (sim.psi - meas.psi));
  out[3] = std::sqrt(w.speed) * (sim.v - meas.v);
  return std::isfinite(out[0]) && std::isfinite(out[1]) &&
         std::isfinite(out[2]) && std::isfinite(out[3]);
}

}  // namespace

void window_variant_residuals(const AlignedExperiment& window,
                              std::span<const Variant> variants,
                              const ErrorWeights& weights,
                              kernels::Backend backend,
                              std::vector<std::vector<double>>& residuals,
                              std::vector<char>& finite) {
  const int length = static_cast<int>(window.size());
  const int steps = length - 1;
  const int n_variants = static_cast<int>(variants.size());
  residuals.assign(n_variants, std::vector<double>(4 * length, 0.0));
  finite.assign(n_variants, 1);

  kernels::RolloutBatch batch;
  batch.dt = window.dt;
  batch.resize(steps);
  fill_shared_inputs(batch, window);

  for (int group = 0; group < n_variants; group += kernels::kLaneCount) {
    for (int lane = 0; lane < kernels::kLaneCount; ++lane) {
      const int v = std::min(group + lane, n_variants - 1);
      batch.set_initial(lane, variants[v].init);
      batch.set_params(lane, variants[v].params);
    }
    kernels::rollout(batch, backend);
    for (int lane = 0; lane < kernels::kLaneCount; ++lane) {
      const int v = group + lane;
      if (v >= n_variants) break;
      std::vector<double>& r = residuals[v];
      bool ok = emit_sample_residuals(variants[v].init, window.measured[0],
                                      weights, r.data());
      for (int k = 0; k < steps; ++k) {
        ok &= emit_sample_residuals(batch.state_after(k, lane),
                                    window.measured[k + 1], weights,
                                    r.data() + 4 * (k + 1));
      }
      finite[v] = ok ? 1 : 0;
    }
  }
}

double window_cost(std::span<const double> residuals) {
  double cost = 0.0;
  for (double r : residuals) cost += r * r;
  return cost;
}

double batched_objective(std::span<const AlignedExperiment> windows,
                         const ModelParams& params, const ErrorWeights& weights,
                         std::span<const VehicleState> init_overrides,
                         ObjectiveDiagnostics* diagnostics,
                         kernels::Backend backend) {
  const std::size_t n = windows.size();
  std::vector<double> window_costs(n, 0.0);
  bool all_finite = true;

  std::size_t w = 0;
  kernels::RolloutBatch batch;
  std::vector<double> sample(4, 0.0);
  while (w < n) {
    // Group consecutive windows of equal length into lanes.
    std::size_t group = 1;
    while (group < kernels::kLaneCount && w + group < n &&
           windows[w + group].size() == windows[w].size()) {
      ++group;
    }
    const int length = static_cast<int>(windows[w].size());
    const int steps = length - 1;
    batch.dt = windows[w].dt;
    batch.resize(steps);
    for (int lane = 0; lane < kernels::kLaneCount; ++lane) {
      const std::size_t wl = w + std::min<std::size_t>(lane, group - 1);
      const AlignedExperiment& window = windows[wl];
      const VehicleState init =
          init_overrides.empty() ? window.measured[0] : init_overrides[wl];
      batch.set_initial(lane, init);
      batch.set_params(lane, params);
      for (int k = 0; k < steps; ++k) {
        batch.set_input(k, lane, window.inputs[k]);
      }
    }
    kernels::rollout(batch, backend);
    for (std::size_t lane = 0; lane < group; ++lane) {
      const std::size_t wl = w + lane;
      const AlignedExperiment& window = windows[wl];
      const VehicleState init =
          init_overrides.empty() ? window.measured[0] : init_overrides[wl];
      double cost = 0.0;
      bool ok = emit_sample_residuals(init, window.measured[0], weights,
                                      sample.data());
      cost += window_cost(std::span<const double>(sample.data(), 4));
      for (int k = 0; k < steps; ++k) {
        ok &= emit_sample_residuals(batch.state_after(k, static_cast<int>(lane)),
                                    window.measured[k + 1], weights,
                                    sample.data());
        cost += window_cost(std::span<const double>(sample.data(), 4));
      }
      // Costs at or beyond the sentinel count as diverged shooting.
      ok = ok && cost < kDivergencePenalty;
      window_costs[wl] = ok ? cost : kDivergencePenalty;
      all_finite &= ok;
    }
    w += group;
  }

  double total = 0.0;
  for (double c : window_costs) total += c;
  if (!all_finite) total = kDivergencePenalty;
  if (diagnostics) {
    diagnostics->penalty_hit = !all_finite;
    diagnostics->window_objectives = std::move(window_costs);
  }
  return total;
}

}  // namespace detail

namespace {

using detail::Variant;

// Dense symmetric solve via Cholesky; returns false when not positive
// definite.
bool cholesky_solve(std::vector<double> a, std::vector<double> b, int dim,
                    std::vector<double>& x) {
  for (int j = 0; j < dim; ++j) {
    double diag = a[j * dim + j];
    for (int k = 0; k < j; ++k) diag -= a[j * dim + k] * a[j * dim + k];
    if (!(diag > 0.0) || !std::isfinite(diag)) return false;
    const double root = std::sqrt(diag);
    a[j * dim + j] = root;
    for (int i = j + 1; i < dim; ++i) {
      double value = a[i * dim + j];
      for (int k = 0; k < j; ++k) value -= a[i * dim + k] * a[j * dim + k];
      a[i * dim + j] = value / root;
    }
  }
  // forward substitution L y = b
  for (int i = 0; i < dim; ++i) {
    double value = b[i];
    for (int k = 0; k < i; ++k) value -= a[i * dim + k] * b[k];
    b[i] = value / a[i * dim + i];
  }
  // back substitution L^T x = y
  x.assign(dim, 0.0);
  for (int i = dim - 1; i >= 0; --i) {
    double value = b[i];
    for (int k = i + 1; k < dim; ++k) value -= a[k * dim + i] * x[k];
    x[i] = value / a[i * dim + i];
  }
  return true;
}

struct Decision {
  // theta = [p1..p10, (free mode: x,y,psi,v per window)]
  std::vector<double> values;
  bool free_inits;
  int windows;

  ModelParams params() const {
    std::array<double, 10> p;
    std::copy_n(values.begin(), 10, p.begin());
    return ModelParams::from_array(p);
  }
  VehicleState init(int w, const AlignedExperiment& window) const {
    if (!free_inits) return window.measured[0];
    const int base = 10 + 4 * w;
    return {values[base], values[base + 1], values[base + 2],
            values[base + 3]};
  }
  std::vector<VehicleState> inits(
      std::span<const AlignedExperiment> aligned) const {
    std::vector<VehicleState> out;
    out.reserve(aligned.size());
    for (int w = 0; w < windows; ++w) out.push_back(init(w, aligned[w]));
    return out;
  }
};

}  // namespace

FitResult estimate_parameters(std::span<const Experiment> experiments,
                              const DelayConfig& delays,
                              const ModelParams& initial_params,
                              const FitOptions& options) {
  if (experiments.empty()) {
    throw std::invalid_argument("estimate_parameters needs experiments");
  }
  if (!initial_params.all_finite()) {
    throw std::invalid_argument("initial parameters must be finite");
  }
  std::vector<AlignedExperiment> aligned;
  aligned.reserve(experiments.size());
  for (const Experiment& exp : experiments) {
    aligned.push_back(apply_delays(exp, delays));
  }
  const int n_windows = static_cast<int>(aligned.size());
  const bool free_inits = options.init_mode == InitMode::kFree;
  const int dim = 10 + (free_inits ? 4 * n_windows : 0);

  Decision theta{std::vector<double>(dim, 0.0), free_inits, n_windows};
  {
    const std::array<double, 10> p = initial_params.to_array();
    std::copy(p.begin(), p.end(), theta.values.begin());
    if (free_inits) {
      for (int w = 0; w < n_windows; ++w) {
        const VehicleState& z0 = aligned[w].measured[0];
        theta.values[10 + 4 * w] = z0.x;
        theta.values[10 + 4 * w + 1] = z0.y;
        theta.values[10 + 4 * w + 2] = z0.psi;
        theta.values[10 + 4 * w + 3] = z0.v;
      }
    }
  }

  FitResult result;
  result.delays = delays;
  FitDiagnostics& diag = result.diagnostics;

  auto evaluate = [&](const Decision& point, std::vector<double>* window_costs,
                      bool* finite) {
    ObjectiveDiagnostics obj_diag;
    const std::vector<VehicleState> inits = point.inits(aligned);
    const double cost = detail::batched_objective(
        aligned, point.params(), options.weights,
        free_inits ? std::span<const VehicleState>(inits)
                   : std::span<const VehicleState>(),
        &obj_diag, options.backend);
    ++diag.objective_evaluations;
    if (obj_diag.penalty_hit) diag.penalty_hit = true;
    if (window_costs) *window_costs = std::move(obj_diag.window_objectives);
    if (finite) *finite = !obj_diag.penalty_hit;
    return cost;
  };

  bool cost_finite = false;
  std::vector<double> window_costs;
  double cost = evaluate(theta, &window_costs, &cost_finite);
  diag.objective_history.push_back(cost);
  if (!cost_finite) {
    result.params = theta.params();
    result.objective = cost;
    result.window_objectives = std::move(window_costs);
    if (free_inits) result.fitted_inits = theta.inits(aligned);
    diag.termination = "nonfinite_initial";
    return result;
  }

  double lambda = options.lambda_init;
  std::string termination;

  std::vector<double> normal(static_cast<std::size_t>(dim) * dim, 0.0);
  std::vector<double> gradient(dim, 0.0);
  std::vector<std::vector<double>> variant_residuals;
  std::vector<char> variant_finite;

  for (int iteration = 0; iteration < options.max_iterations;
       ++iteration) {
    // Assemble J^T J and J^T r window by window. A window only sees the 10
    // parameter columns plus (free mode) its own 4 initial-state columns.
    std::fill(normal.begin(), normal.end(), 0.0);
    std::fill(gradient.begin(), gradient.end(), 0.0);
    ++diag.jacobian_evaluations;

    const ModelParams nominal_params = theta.params();
    bool jacobian_ok = true;
    for (int w = 0; w < n_windows && jacobian_ok; ++w) {
      const AlignedExperiment& window = aligned[w];
      const VehicleState nominal_init = theta.init(w, window);
      const int local_cols = 10 + (free_inits ? 4 : 0);

      std::vector<Variant> variants;
      std::vector<double> steps_used(local_cols, 0.0);
      std::vector<int> global_col(local_cols, 0);
      variants.reserve(local_cols + 1);
      variants.push_back({nominal_params, nominal_init});
      for (int i = 0; i < 10; ++i) {
        std::array<double, 10> p = nominal_params.to_array();
        const double h = std::max(std::abs(p[i]) * options.fd_relative_step,
                                  options.fd_step_floor);
        p[i] += h;
        variants.push_back({ModelParams::from_array(p), nominal_init});
        steps_used[i] = h;
        global_col[i] = i;
      }
      if (free_inits) {
        const std::array<double, 4> comps{nominal_init.x, nominal_init.y,
                                          nominal_init.psi, nominal_init.v};
        for (int c = 0; c < 4; ++c) {
          const double h =
              std::max(std::abs(comps[c]) * options.fd_relative_step,
                       options.fd_step_floor);
          VehicleState init = nominal_init;
          (c == 0   ? init.x
           : c == 1 ? init.y
           : c == 2 ? init.psi
                    : init.v) += h;
          variants.push_back({nominal_params, init});
          steps_used[10 + c] = h;
          global_col[10 + c] = 10 + 4 * w + c;
        }
      }

      detail::window_variant_residuals(window, variants, options.weights,
                                       options.backend, variant_residuals,
                                       variant_finite);
      if (!variant_finite[0]) {
        // The nominal point diverged between acceptance and this Jacobian;
        // cannot happen with deterministic evaluation, but guard anyway.
        jacobian_ok = false;
        diag.penalty_hit = true;
        break;
      }
      const std::vector<double>& r0 = variant_residuals[0];
      const int rows = static_cast<int>(r0.size());
      std::vector<double> jac(static_cast<std::size_t>(rows) * local_cols,
                              0.0);
      for (int a = 0; a < local_cols; ++a) {
        if (!variant_finite[a + 1]) {
          // Perturbed rollout diverged: no usable slope, leave the column
          // zero and let damping keep the step inside the finite region.
          diag.penalty_hit = true;
          continue;
        }
        const std::vector<double>& ra = variant_residuals[a + 1];
        const double inv_h = 1.0 / steps_used[a];
        for (int row = 0; row < rows; ++row) {
          jac[static_cast<std::size_t>(row) * local_cols + a] =
              (ra[row] - r0[row]) * inv_h;
        }
      }
      for (int a = 0; a < local_cols; ++a) {
        const int ga = global_col[a];
        double g_acc = 0.0;
        for (int row = 0; row < rows; ++row) {
          g_acc += jac[static_cast<std::size_t>(row) * local_cols + a] *
                   r0[row];
        }
        gradient[ga] += g_acc;
        for (int b = a; b < local_cols; ++b) {
          const int gb = global_col[b];
          double acc = 0.0;
          for (int row = 0; row < rows; ++row) {
            acc += jac[static_cast<std::size_t>(row) * local_cols + a] *
                   jac[static_cast<std::size_t>(row) * local_cols + b];
          }
          normal[static_cast<std::size_t>(ga) * dim + gb] += acc;
          if (ga != gb) {
            normal[static_cast<std::size_t>(gb) * dim + ga] += acc;
          }
        }
      }
    }
    if (!jacobian_ok) {
      termination = "stalled";
      break;
    }

    diag.unidentifiable_params.clear();
    for (int i = 0; i < dim; ++i) {
      if (normal[static_cast<std::size_t>(i) * dim + i] == 0.0) {
        diag.unidentifiable_params.push_back(i);
      }
    }

    double grad_norm = 0.0;
    for (double g : gradient) grad_norm = std::max(grad_norm, std::abs(g));
    if (grad_norm < options.gradient_tolerance) {
      termination = "gradient_tol";
      break;
    }

    // Damped step with diagonal (Marquardt) scaling.
    bool accepted = false;
    while (true) {
      std::vector<double> damped = normal;
      for (int i = 0; i < dim; ++i) {
        const double d = std::max(normal[static_cast<std::size_t>(i) * dim + i],
                                  1e-12);
        damped[static_cast<std::size_t>(i) * dim + i] += lambda * d;
      }
      std::vector<double> rhs(dim);
      for (int i = 0; i < dim; ++i) rhs[i] = -gradient[i];
      std::vector<double> step;
      if (!cholesky_solve(std::move(damped), std::move(rhs), dim, step)) {
        ++diag.singular_solves;
        ++diag.damping_increases;
        lambda *= options.lambda_scale;
        if (lambda > 1e15) {
          termination = "stalled";
          break;
        }
        continue;
      }
      double step_norm = 0.0;
      for (double s : step) step_norm += s * s;
      step_norm = std::sqrt(step_norm);
      if (step_norm < options.step_tolerance) {
        termination = "step_tol";
        break;
      }
      Decision trial = theta;
      for (int i = 0; i < dim; ++i) trial.values[i] += step[i];
      bool trial_finite = false;
      std::vector<double> trial_window_costs;
      const double trial_cost =
          evaluate(trial, &trial_window_costs, &trial_finite);
      if (trial_finite && trial_cost < cost) {
        theta = std::move(trial);
        cost = trial_cost;
        window_costs = std::move(trial_window_costs);
        diag.objective_history.push_back(cost);
        lambda = std::max(lambda / options.lambda_scale, 1e-12);
        accepted = true;
        break;
      }
      ++diag.damping_increases;
      lambda *= options.lambda_scale;
      if (lambda > 1e15) {
        termination = "stalled";
        break;
      }
    }
    ++diag.iterations;
    if (!termination.empty()) break;
    if (!accepted) {
      termination = "stalled";
      break;
    }
  }
  if (termination.empty()) termination = "max_iter";

  result.params = theta.params();
  result.objective = cost;
  result.window_objectives = std::move(window_costs);
  if (free_inits) result.fitted_inits = theta.inits(aligned);
  diag.termination = termination;
  return result;
}

FitResult delay_grid_search(std::span<const Experiment> experiments,
                            const DelayRanges& ranges,
                            const ModelParams& initial_params,
                            const FitOptions& options, GridReport* report) {
  if (ranges.ips_min > ranges.ips_max || ranges.local_min > ranges.local_max ||
      ranges.actuation_min > ranges.actuation_max) {
    throw std::invalid_argument("empty delay range");
  }
  std::optional<FitResult> best;
  bool tie_seen_for_best = false;
  std::vector<std::string> failures;

  // Lexicographic (actuation, ips, local) iteration order makes the
  // tie-break "first strictly better wins".
  for (int act = ranges.actuation_min; act <= ranges.actuation_max; ++act) {
    for (int ips = ranges.ips_min; ips <= ranges.ips_max; ++ips) {
      for (int local = ranges.local_min; local <= ranges.local_max; ++local) {
        const DelayConfig delays{ips, local, act};
        GridCell cell;
        cell.delays = delays;
        try {
          FitResult fit =
              estimate_parameters(experiments, delays, initial_params,
                                  options);
          cell.solved = true;
          cell.objective = fit.objective;
          cell.termination = fit.diagnostics.termination;
          if (!best || fit.objective < best->objective) {
            best = std::move(fit);
            tie_seen_for_best = false;
          } else if (fit.objective == best->objective) {
            tie_seen_for_best = true;
          }
        } catch (const std::exception& e) {
          cell.error = e.what();
          failures.push_back("delays " + std::to_string(ips) + "/" +
                             std::to_string(local) + "/" +
                             std::to_string(act) + ": " + e.what());
        }
        if (report) report->cells.push_back(std::move(cell));
      }
    }
  }
  if (!best) {
    std::string message = "every delay combination failed:";
    for (const std::string& f : failures) message += "\n  " + f;
    throw std::runtime_error(message);
  }
  best->diagnostics.tie_break_applied = tie_seen_for_best;

  // The alignment only pins the delays relative to each other: shifting both
  // sensor delays by +c and the actuation delay by -c selects exactly the
  // same rows and pairings, so those triples tie bitwise. Report the
  // canonical representative, the one with min(ips, local) = 0.
  const int gauge =
      std::min(best->delays.ips_delay, best->delays.local_delay);
  if (gauge > 0) {
    best->delays.ips_delay -= gauge;
    best->delays.local_delay -= gauge;
    best->delays.actuation_delay += gauge;
    best->diagnostics.gauge_normalized = true;
  }
  return *best;
}

}  // namespace minifleet::ident
