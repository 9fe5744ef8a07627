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

#include "minifleet/cli/commands.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "minifleet/ident/log_io.hpp"
#include "minifleet/io/csv.hpp"
#include "minifleet/labsim/ident_log.hpp"
#include "minifleet/labsim/scenario.hpp"
#include "minifleet/labsim/trace_io.hpp"
#include "minifleet/labsim/world.hpp"
#include "minifleet/version.hpp"

namespace minifleet::cli {

namespace {

using nlohmann::json;

json input_entry(const std::filesystem::path& path) {
  return {{"path", path.string()}, {"fnv1a64", io::file_digest(path)}};
}

void write_manifest(const std::filesystem::path& path,
                    const std::string& command, std::uint64_t seed,
                    const json& config, const json& inputs,
                    const json& outputs) {
  const json manifest = {{"command", command},
                         {"tool", "minifleet"},
                         {"version", kVersion},
                         {"seed", seed},
                         {"config", config},
                         {"inputs", inputs},
                         {"outputs", outputs}};
  io::write_file(path, manifest.dump(2) + "\n");
}

int fail(int code, const std::string& message) {
  std::fprintf(stderr, "error: %s\n", message.c_str());
  return code;
}

ident::DelayConfig delays_from_params_file(
    const std::filesystem::path& path) {
  // Fit reports carry the identified delays next to the parameters.
  const json j = json::parse(io::read_file(path));
  ident::DelayConfig delays;
  if (j.contains("delays")) {
    delays.ips_delay = j["delays"].value("ips", 0);
    delays.local_delay = j["delays"].value("local", 0);
    delays.actuation_delay = j["delays"].value("actuation", 0);
  }
  return delays;
}

}  // namespace

ident::DelayRanges parse_grid_spec(const std::string& text) {
  ident::DelayRanges ranges;
  std::stringstream stream(text);
  std::string part;
  while (std::getline(stream, part, ',')) {
    const auto eq = part.find('=');
    const auto dots = part.find("..");
    if (eq == std::string::npos || dots == std::string::npos || dots < eq) {
      throw std::invalid_argument("bad grid spec '" + part +
                                  "', expected key=min..max");
    }
    const std::string key = part.substr(0, eq);
    const int lo = std::stoi(part.substr(eq + 1, dots - eq - 1));
    const int hi = std::stoi(part.substr(dots + 2));
    if (key == "ips") {
      ranges.ips_min = lo;
      ranges.ips_max = hi;
    } else if (key == "local") {
      ranges.local_min = lo;
      ranges.local_max = hi;
    } else if (key == "act") {
      ranges.actuation_min = lo;
      ranges.actuation_max = hi;
    } else {
      throw std::invalid_argument("unknown grid key '" + key + "'");
    }
  }
  return ranges;
}

int run_simulate(const SimulateOptions& options) {
  labsim::ScenarioSpec spec;
  labsim::LabConfig lab;
  json inputs = json::object();
  try {
    spec = labsim::load_scenario(options.scenario_path);
    inputs["scenario"] = input_entry(options.scenario_path);
    if (!options.lab_config_path.empty()) {
      lab = labsim::load_lab_config(options.lab_config_path);
      inputs["lab_config"] = input_entry(options.lab_config_path);
    }
  } catch (const std::exception& e) {
    return fail(kExitConfigError, e.what());
  }
  if (options.seed) lab.seed = *options.seed;

  const auto problems = labsim::validate_scenario(spec, lab);
  if (!problems.empty()) {
    std::string message = "invalid configuration:";
    for (const auto& p : problems) message += "\n  " + p;
    return fail(kExitConfigError, message);
  }

  try {
    const labsim::SimTrace trace = labsim::run_scenario(spec, lab);
    std::filesystem::create_directories(options.out_dir);
    labsim::export_trace_csv(trace, options.out_dir);
    write_manifest(
        options.out_dir / "manifest.json", "simulate", lab.seed,
        {{"scenario", labsim::scenario_json(spec)},
         {"lab", labsim::lab_config_json(lab)}},
        inputs,
        json::array({"truth.csv", "ips.csv", "commands.csv", "messages.csv"}));
    std::printf("simulated %d steps, %zu vehicles -> %s\n", trace.steps,
                spec.vehicles.size(), options.out_dir.string().c_str());
    return kExitOk;
  } catch (const std::exception& e) {
    return fail(kExitRuntimeError, e.what());
  }
}

int run_identify(const IdentifyOptions& options) {
  std::vector<ident::MeasurementSample> log;
  try {
    log = ident::load_measurement_log(options.log_path);
  } catch (const std::exception& e) {
    return fail(kExitConfigError, e.what());
  }

  ident::SliceReport slice_report;
  const std::vector<ident::Experiment> experiments = ident::slice_experiments(
      log, options.window, kDefaultTimestep, &slice_report);
  if (experiments.empty()) {
    std::string message =
        "insufficient data: 0 usable windows (log rows: " +
        std::to_string(log.size()) + ", window: " +
        std::to_string(options.window) + ")";
    for (const auto& dropped : slice_report.dropped) {
      message += "\n  window " + std::to_string(dropped.window_index) +
                 " dropped: " + dropped.reason;
    }
    return fail(kExitInsufficientData, message);
  }

  ident::FitOptions fit_options;
  fit_options.init_mode = options.init_mode;
  fit_options.weights = options.weights;
  try {
    ident::GridReport grid_report;
    const ident::FitResult result = ident::delay_grid_search(
        experiments, options.grid, ModelParams{}, fit_options, &grid_report);

    const auto p = result.params.to_array();
    std::printf("windows: %zu (dropped %zu, tail %d samples)\n",
                experiments.size(), slice_report.dropped.size(),
                slice_report.tail_samples_dropped);
    for (int i = 0; i < 10; ++i) {
      std::printf("p%-2d = % .6f\n", i + 1, p[i]);
    }
    std::printf("delays: ips=%d local=%d actuation=%d\n",
                result.delays.ips_delay, result.delays.local_delay,
                result.delays.actuation_delay);
    std::printf("objective = %.12g (%s after %d iterations)\n",
                result.objective, result.diagnostics.termination.c_str(),
                result.diagnostics.iterations);

    if (!options.out_path.empty()) {
      ident::write_fit_report(options.out_path, result, fit_options);
      write_manifest(
          options.out_path.parent_path() / "manifest.json", "identify",
          0,
          {{"window", options.window},
           {"grid",
            {{"ips", {options.grid.ips_min, options.grid.ips_max}},
             {"local", {options.grid.local_min, options.grid.local_max}},
             {"act",
              {options.grid.actuation_min, options.grid.actuation_max}}}},
           {"options", ident::fit_options_json(fit_options)}},
          {{"log", input_entry(options.log_path)}},
          json::array({options.out_path.filename().string()}));
    }
    return kExitOk;
  } catch (const std::exception& e) {
    return fail(kExitRuntimeError, e.what());
  }
}

int run_follow(const FollowOptions& options) {
  labsim::ScenarioSpec spec;
  labsim::LabConfig lab;
  json inputs = json::object();
  try {
    spec = labsim::load_scenario(options.scenario_path);
    inputs["scenario"] = input_entry(options.scenario_path);
    if (!options.lab_config_path.empty()) {
      lab = labsim::load_lab_config(options.lab_config_path);
      inputs["lab_config"] = input_entry(options.lab_config_path);
    }
    if (!options.params_path.empty()) {
      const ModelParams params = ident::load_model_params(options.params_path);
      inputs["params"] = input_entry(options.params_path);
      for (auto& vehicle : spec.vehicles) vehicle.controller_model = params;
    }
    if (!options.controller.empty()) {
      for (auto& vehicle : spec.vehicles) {
        if (options.controller == "mpc") {
          vehicle.controller = control::ControllerType::kMpc;
        } else if (options.controller == "pid") {
          vehicle.controller = control::ControllerType::kPid;
        } else {
          throw std::invalid_argument("unknown controller '" +
                                      options.controller + "'");
        }
      }
    }
  } catch (const std::exception& e) {
    return fail(kExitConfigError, e.what());
  }
  if (options.seed) lab.seed = *options.seed;

  const auto problems = labsim::validate_scenario(spec, lab);
  if (!problems.empty()) {
    std::string message = "invalid configuration:";
    for (const auto& p : problems) message += "\n  " + p;
    return fail(kExitConfigError, message);
  }

  try {
    const labsim::SimTrace trace = labsim::run_scenario(spec, lab);
    std::filesystem::create_directories(options.out_dir);
    labsim::export_trace_csv(trace, options.out_dir);

    json summary = {{"controller", options.controller.empty()
                                       ? "scenario"
                                       : options.controller},
                    {"vehicles", json::array()}};
    std::ostringstream errors_csv;
    errors_csv << "vehicle,step,t,x,y,ref_x,ref_y,position_error,yaw_error\n";
    for (const auto& vehicle : spec.vehicles) {
      if (!trace.references.count(vehicle.id)) continue;
      const labsim::TrackingStats stats =
          labsim::tracking_stats(trace, vehicle.id);
      summary["vehicles"].push_back(
          {{"id", vehicle.id},
           {"controller", vehicle.controller == control::ControllerType::kMpc
                              ? "mpc"
                              : "pid"},
           {"mean_position_error", stats.mean_position_error},
           {"max_position_error", stats.max_position_error},
           {"mean_yaw_error", stats.mean_yaw_error},
           {"max_yaw_error", stats.max_yaw_error},
           {"samples", stats.samples}});
      const Trajectory& reference = trace.references.at(vehicle.id);
      for (const labsim::TruthRow& row : trace.truth) {
        if (row.vehicle != vehicle.id) continue;
        const double t = row.step * trace.dt;
        if (t > reference.end_time()) continue;
        const ReferenceSample ref = reference.interpolate(t);
        const double pe = std::hypot(row.state.x - ref.x, row.state.y - ref.y);
        const double ref_speed = std::hypot(ref.vx, ref.vy);
        const double ye =
            ref_speed > 0.05
                ? std::abs(std::remainder(
                      row.state.psi - std::atan2(ref.vy, ref.vx), 2.0 * M_PI))
                : 0.0;
        errors_csv << row.vehicle << ',' << row.step << ','
                   << io::format_double(t) << ','
                   << io::format_double(row.state.x) << ','
                   << io::format_double(row.state.y) << ','
                   << io::format_double(ref.x) << ','
                   << io::format_double(ref.y) << ','
                   << io::format_double(pe) << ',' << io::format_double(ye)
                   << '\n';
      }
      std::printf(
          "vehicle %d: mean position error %.4f m, max %.4f m over %d "
          "samples\n",
          vehicle.id, stats.mean_position_error, stats.max_position_error,
          stats.samples);
    }
    io::write_file(options.out_dir / "tracking_summary.json",
                   summary.dump(2) + "\n");
    io::write_file(options.out_dir / "tracking_errors.csv", errors_csv.str());
    write_manifest(options.out_dir / "manifest.json", "follow", lab.seed,
                   {{"scenario", labsim::scenario_json(spec)},
                    {"lab", labsim::lab_config_json(lab)},
                    {"controller", options.controller}},
                   inputs,
                   json::array({"truth.csv", "ips.csv", "commands.csv",
                                "messages.csv", "tracking_summary.json",
                                "tracking_errors.csv"}));
    return kExitOk;
  } catch (const std::exception& e) {
    return fail(kExitRuntimeError, e.what());
  }
}

int run_eval_model(const EvalModelOptions& options) {
  std::vector<ident::MeasurementSample> log;
  ModelParams params;
  ident::DelayConfig delays;
  json inputs = json::object();
  try {
    log = ident::load_measurement_log(options.log_path);
    inputs["log"] = input_entry(options.log_path);
    params = ident::load_model_params(options.params_path);
    inputs["params"] = input_entry(options.params_path);
    delays = options.delays ? *options.delays
                            : delays_from_params_file(options.params_path);
  } catch (const std::exception& e) {
    return fail(kExitConfigError, e.what());
  }

  const std::vector<ident::Experiment> experiments =
      ident::slice_experiments(log, options.window);
  if (experiments.empty()) {
    return fail(kExitInsufficientData,
                "insufficient data: 0 usable windows");
  }

  try {
    // Windowed open-loop replay against the measurements.
    double sum2[4] = {0, 0, 0, 0};
    double max_abs[4] = {0, 0, 0, 0};
    double sum_abs[4] = {0, 0, 0, 0};
    long long count = 0;
    std::ostringstream plot;
    plot << "t,x_pred,x_meas,y_pred,y_meas,psi_pred,psi_meas,v_pred,v_meas\n";
    for (const ident::Experiment& experiment : experiments) {
      const ident::AlignedExperiment aligned =
          ident::apply_delays(experiment, delays);
      VehicleState z = aligned.measured.front();
      for (std::size_t j = 0; j < aligned.size(); ++j) {
        const VehicleState& meas = aligned.measured[j];
        const double t = aligned.t0 + static_cast<double>(j) * aligned.dt;
        const double residual[4] = {
            z.x - meas.x, z.y - meas.y,
            std::remainder(z.psi - meas.psi, 2.0 * M_PI), z.v - meas.v};
        for (int c = 0; c < 4; ++c) {
          sum2[c] += residual[c] * residual[c];
          sum_abs[c] += std::abs(residual[c]);
          max_abs[c] = std::max(max_abs[c], std::abs(residual[c]));
        }
        ++count;
        plot << io::format_double(t) << ',' << io::format_double(z.x) << ','
             << io::format_double(meas.x) << ',' << io::format_double(z.y)
             << ',' << io::format_double(meas.y) << ','
             << io::format_double(z.psi) << ',' << io::format_double(meas.psi)
             << ',' << io::format_double(z.v) << ','
             << io::format_double(meas.v) << '\n';
        if (j + 1 < aligned.size()) {
          z = euler_step(z, aligned.inputs[j], params, aligned.dt);
        }
      }
    }

    static constexpr const char* kChannels[4] = {"x", "y", "psi", "v"};
    json channels = json::object();
    for (int c = 0; c < 4; ++c) {
      channels[kChannels[c]] = {
          {"rms", std::sqrt(sum2[c] / static_cast<double>(count))},
          {"mean_abs", sum_abs[c] / static_cast<double>(count)},
          {"max_abs", max_abs[c]}};
    }
    const json report = {{"channels", channels},
                         {"windows", experiments.size()},
                         {"samples", count},
                         {"delays",
                          {{"ips", delays.ips_delay},
                           {"local", delays.local_delay},
                           {"actuation", delays.actuation_delay}}}};
    io::write_file(options.out_path, report.dump(2) + "\n");
    const std::filesystem::path plot_path =
        options.out_path.parent_path() /
        (options.out_path.stem().string() + "_series.csv");
    io::write_file(plot_path, plot.str());
    write_manifest(options.out_path.parent_path() / "manifest.json",
                   "eval-model", 0,
                   {{"window", options.window},
                    {"delays",
                     {{"ips", delays.ips_delay},
                      {"local", delays.local_delay},
                      {"actuation", delays.actuation_delay}}}},
                   inputs,
                   json::array({options.out_path.filename().string(),
                                plot_path.filename().string()}));
    for (int c = 0; c < 4; ++c) {
      std::printf("%-3s rms %.6g max %.6g\n", kChannels[c],
                  std::sqrt(sum2[c] / static_cast<double>(count)), max_abs[c]);
    }
    return kExitOk;
  } catch (const std::exception& e) {
    return fail(kExitRuntimeError, e.what());
  }
}

int run_gen_log(const GenLogOptions& options) {
  ModelParams params = ModelParams::reference_fit();
  json inputs = json::object();
  try {
    if (!options.params_path.empty()) {
      params = ident::load_model_params(options.params_path);
      inputs["params"] = input_entry(options.params_path);
    }
  } catch (const std::exception& e) {
    return fail(kExitConfigError, e.what());
  }
  try {
    labsim::IdentLogOptions gen;
    gen.duration = options.duration;
    gen.profile = options.profile;
    gen.delays = options.delays;
    gen.noise_pos_sigma = options.noise_pos;
    gen.noise_yaw_sigma = options.noise_yaw;
    gen.noise_speed_sigma = options.noise_speed;
    gen.seed = options.seed;
    const auto log = labsim::generate_ident_log(params, gen);
    ident::save_measurement_log(options.out_path, log);
    write_manifest(options.out_path.parent_path() / "manifest.json",
                   "gen-log", options.seed,
                   {{"duration", options.duration},
                    {"profile", options.profile},
                    {"delays",
                     {{"ips", options.delays.ips_delay},
                      {"local", options.delays.local_delay},
                      {"actuation", options.delays.actuation_delay}}},
                    {"noise",
                     {{"pos", options.noise_pos},
                      {"yaw", options.noise_yaw},
                      {"speed", options.noise_speed}}}},
                   inputs,
                   json::array({options.out_path.filename().string()}));
    std::printf("wrote %zu samples -> %s\n", log.size(),
                options.out_path.string().c_str());
    return kExitOk;
  } catch (const std::exception& e) {
    return fail(kExitRuntimeError, e.what());
  }
}

}  // namespace minifleet::cli
