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

#ifndef MINIFLEET_IDENT_LOG_IO_HPP_
#define MINIFLEET_IDENT_LOG_IO_HPP_

#include <filesystem>
#include <vector>

#include <json.hpp>

#include "minifleet/ident/estimate.hpp"

namespace minifleet::ident {

/// Measurement log CSV, header `t,x_ips,y_ips,psi_ips,v_odo,m,d,u`, SI
/// units, radians, strictly increasing t. Malformed rows raise
/// io::ParseError with the file line.
std::vector<MeasurementSample> load_measurement_log(
    const std::filesystem::path& path);
void save_measurement_log(const std::filesystem::path& path,
                          std::span<const MeasurementSample> samples);

nlohmann::json fit_options_json(const FitOptions& options);
nlohmann::json fit_report_json(const FitResult& result,
                               const FitOptions& options);
void write_fit_report(const std::filesystem::path& path,
                      const FitResult& result, const FitOptions& options);

/// Reads `{"p": [...]}` (or a fit report with `params.p`).
ModelParams load_model_params(const std::filesystem::path& path);
void save_model_params(const std::filesystem::path& path,
                       const ModelParams& params);

}  // namespace minifleet::ident

#endif  // MINIFLEET_IDENT_LOG_IO_HPP_
