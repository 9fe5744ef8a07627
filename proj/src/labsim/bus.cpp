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

#include "minifleet/labsim/bus.hpp"

#include <algorithm>

namespace minifleet::labsim {

int MessageBus::add_link(const std::string& name, std::uint64_t seed,
                         std::uint64_t vehicle_key,
                         std::uint64_t direction_key) {
  Link link;
  link.name = name;
  link.rng = RngStream::keyed(seed, "bus", vehicle_key, direction_key);
  links_.push_back(std::move(link));
  return static_cast<int>(links_.size()) - 1;
}

void MessageBus::send(int link_id, int step, const std::string& type,
                      const std::string& text) {
  Link& link = links_[link_id];
  Record record;
  record.link = link_id;
  record.send_step = step;
  record.type = type;
  record.text = text;
  record.sequence = static_cast<int>(log_.size());

  if (!link.rng.bernoulli(model_.loss_probability)) {
    int deliver = step + model_.latency_steps;
    if (model_.jitter_steps > 0) {
      deliver += static_cast<int>(
          link.rng.bounded(static_cast<std::uint64_t>(model_.jitter_steps)));
    }
    deliver = std::max(deliver, link.watermark);  // per-link FIFO
    link.watermark = deliver;
    record.deliver_step = deliver;
    link.queue.emplace(deliver, record.sequence);
  }
  log_.push_back(std::move(record));
}

std::vector<std::string> MessageBus::deliver(int link_id, int step) {
  Link& link = links_[link_id];
  std::vector<std::string> out;
  auto [begin, end] = link.queue.equal_range(step);
  // multimap preserves insertion order per key; together with the watermark
  // this keeps per-link FIFO.
  for (auto it = begin; it != end; ++it) {
    out.push_back(log_[it->second].text);
  }
  link.queue.erase(begin, end);
  return out;
}

}  // namespace minifleet::labsim
