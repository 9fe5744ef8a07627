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

#include "minifleet/ident/log_io.hpp"

#include <sstream>

#include "minifleet/io/csv.hpp"

namespace minifleet::ident {

std::vector<MeasurementSample> load_measurement_log(
    const std::filesystem::path& path) {
  const io::CsvTable table = io::read_csv(path);
  const std::vector<std::string> expected = {"t", "x_ips", "y_ips", "psi_ips",
                                             "v_odo", "m", "d", "u"};
  if (table.header != expected) {
    throw io::ParseError("expected header t,x_ips,y_ips,psi_ips,v_odo,m,d,u",
                         1);
  }
  std::vector<MeasurementSample> samples;
  samples.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const std::size_t line = table.row_lines[i];
    if (row.size() != 8) {
      throw io::ParseError(
          "expected 8 fields, got " + std::to_string(row.size()), line);
    }
    MeasurementSample s;
    try {
      s.t = io::parse_double(row[0]);
      s.x_ips = io::parse_double(row[1]);
      s.y_ips = io::parse_double(row[2]);
      s.psi_ips = io::parse_double(row[3]);
      s.v_odo = io::parse_double(row[4]);
      s.m = io::parse_double(row[5]);
      s.d = io::parse_double(row[6]);
      s.u = io::parse_double(row[7]);
    } catch (const std::invalid_argument& e) {
      throw io::ParseError(e.what(), line);
    }
    if (!s.all_finite()) {
      throw io::ParseError("non-finite field", line);
    }
    if (!samples.empty() && !(s.t > samples.back().t)) {
      throw io::ParseError("timestamps must be strictly increasing", line);
    }
    samples.push_back(s);
  }
  return samples;
}

void save_measurement_log(const std::filesystem::path& path,
                          std::span<const MeasurementSample> samples) {
  std::ostringstream out;
  out << "t,x_ips,y_ips,psi_ips,v_odo,m,d,u\n";
  for (const MeasurementSample& s : samples) {
    out << io::format_double(s.t) << ',' << io::format_double(s.x_ips) << ','
        << io::format_double(s.y_ips) << ',' << io::format_double(s.psi_ips)
        << ',' << io::format_double(s.v_odo) << ',' << io::format_double(s.m)
        << ',' << io::format_double(s.d) << ',' << io::format_double(s.u)
        << '\n';
  }
  io::write_file(path, out.str());
}

nlohmann::json fit_options_json(const FitOptions& options) {
  return {
      {"init_mode",
       options.init_mode == InitMode::kMeasured ? "measured" : "free"},
      {"weights",
       {{"pos_x", options.weights.pos_x},
        {"pos_y", options.weights.pos_y},
        {"yaw", options.weights.yaw},
        {"speed", options.weights.speed}}},
      {"max_iterations", options.max_iterations},
      {"fd_relative_step", options.fd_relative_step},
      {"fd_step_floor", options.fd_step_floor},
      {"lambda_init", options.lambda_init},
      {"lambda_scale", options.lambda_scale},
      {"gradient_tolerance", options.gradient_tolerance},
      {"step_tolerance", options.step_tolerance},
      {"backend",
       std::string(kernels::backend_name(kernels::resolve(options.backend)))},
  };
}

nlohmann::json fit_report_json(const FitResult& result,
                               const FitOptions& options) {
  const std::array<double, 10> p = result.params.to_array();
  nlohmann::json inits = nlohmann::json::array();
  for (const VehicleState& s : result.fitted_inits) {
    inits.push_back({{"x", s.x}, {"y", s.y}, {"psi", s.psi}, {"v", s.v}});
  }
  return {
      {"params", {{"p", std::vector<double>(p.begin(), p.end())}}},
      {"delays",
       {{"ips", result.delays.ips_delay},
        {"local", result.delays.local_delay},
        {"actuation", result.delays.actuation_delay}}},
      {"objective", result.objective},
      {"window_objectives", result.window_objectives},
      {"fitted_inits", inits},
      {"diagnostics",
       {{"iterations", result.diagnostics.iterations},
        {"termination", result.diagnostics.termination},
        {"objective_evaluations", result.diagnostics.objective_evaluations},
        {"jacobian_evaluations", result.diagnostics.jacobian_evaluations},
        {"damping_increases", result.diagnostics.damping_increases},
        {"singular_solves", result.diagnostics.singular_solves},
        {"penalty_hit", result.diagnostics.penalty_hit},
        {"tie_break_applied", result.diagnostics.tie_break_applied},
        {"gauge_normalized", result.diagnostics.gauge_normalized},
        {"objective_history", result.diagnostics.objective_history},
        {"unidentifiable_params", result.diagnostics.unidentifiable_params}}},
      {"options", fit_options_json(options)},
  };
}

void write_fit_report(const std::filesystem::path& path,
                      const FitResult& result, const FitOptions& options) {
  io::write_file(path, fit_report_json(result, options).dump(2) + "\n");
}

ModelParams load_model_params(const std::filesystem::path& path) {
  const nlohmann::json j = nlohmann::json::parse(io::read_file(path));
  const nlohmann::json* node = &j;
  if (j.contains("params")) node = &j.at("params");
  if (!node->contains("p")) {
    throw std::runtime_error(path.string() +
                             ": expected a JSON object with a \"p\" array");
  }
  const auto values = node->at("p").get<std::vector<double>>();
  if (values.size() != 10) {
    throw std::runtime_error(path.string() + ": \"p\" must have 10 entries");
  }
  std::array<double, 10> p;
  std::copy(values.begin(), values.end(), p.begin());
  return ModelParams::from_array(p);
}

void save_model_params(const std::filesystem::path& path,
                       const ModelParams& params) {
  const std::array<double, 10> p = params.to_array();
  const nlohmann::json j = {
      {"p", std::vector<double>(p.begin(), p.end())}};
  io::write_file(path, j.dump(2) + "\n");
}

}  // namespace minifleet::ident
