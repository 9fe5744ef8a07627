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

#ifndef MINIFLEET_LABSIM_TRACE_IO_HPP_
#define MINIFLEET_LABSIM_TRACE_IO_HPP_

#include <filesystem>

#include "minifleet/labsim/world.hpp"

namespace minifleet::labsim {

/// One CSV per stream: truth.csv, ips.csv, commands.csv, messages.csv.
/// Deterministic byte-for-byte for a given trace.
void export_trace_csv(const SimTrace& trace,
                      const std::filesystem::path& directory);

std::string truth_csv(const SimTrace& trace);
std::string ips_csv(const SimTrace& trace);
std::string commands_csv(const SimTrace& trace);
std::string messages_csv(const SimTrace& trace);

}  // namespace minifleet::labsim

#endif  // MINIFLEET_LABSIM_TRACE_IO_HPP_
