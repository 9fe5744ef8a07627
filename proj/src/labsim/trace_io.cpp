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

#include "minifleet/labsim/trace_io.hpp"

#include <sstream>

#include "minifleet/io/csv.hpp"

namespace minifleet::labsim {

namespace {

const char* mode_name(control::OperatingMode mode) {
  return mode == control::OperatingMode::kExternalControl
             ? "external_control"
             : "trajectory_following";
}

}  // namespace

std::string truth_csv(const SimTrace& trace) {
  std::ostringstream out;
  out << "step,t,vehicle,x,y,psi,v\n";
  for (const TruthRow& row : trace.truth) {
    out << row.step << ',' << io::format_double(row.step * trace.dt) << ','
        << row.vehicle << ',' << io::format_double(row.state.x) << ','
        << io::format_double(row.state.y) << ','
        << io::format_double(row.state.psi) << ','
        << io::format_double(row.state.v) << '\n';
  }
  return out.str();
}

std::string ips_csv(const SimTrace& trace) {
  std::ostringstream out;
  out << "vehicle,measured_step,deliver_step,lost,x,y,psi\n";
  for (const IpsRow& row : trace.ips) {
    out << row.vehicle << ',' << row.measured_step << ',' << row.deliver_step
        << ',' << (row.lost ? 1 : 0) << ',' << io::format_double(row.x) << ','
        << io::format_double(row.y) << ',' << io::format_double(row.psi)
        << '\n';
  }
  return out.str();
}

std::string commands_csv(const SimTrace& trace) {
  std::ostringstream out;
  out << "vehicle,commanded_step,applied_step,m,d,u,mode,safe_stop\n";
  for (const CommandRow& row : trace.commands) {
    out << row.vehicle << ',' << row.commanded_step << ',' << row.applied_step
        << ',' << io::format_double(row.m) << ',' << io::format_double(row.d)
        << ',' << io::format_double(row.u) << ',' << mode_name(row.mode) << ','
        << (row.safe_stop ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string messages_csv(const SimTrace& trace) {
  std::ostringstream out;
  out << "link,send_step,deliver_step,type,payload\n";
  for (const MessageRow& row : trace.messages) {
    out << io::csv_escape(row.link) << ',' << row.send_step << ','
        << row.deliver_step << ',' << io::csv_escape(row.type) << ','
        << io::csv_escape(row.payload) << '\n';
  }
  return out.str();
}

void export_trace_csv(const SimTrace& trace,
                      const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory);
  io::write_file(directory / "truth.csv", truth_csv(trace));
  io::write_file(directory / "ips.csv", ips_csv(trace));
  io::write_file(directory / "commands.csv", commands_csv(trace));
  io::write_file(directory / "messages.csv", messages_csv(trace));
}

}  // namespace minifleet::labsim
