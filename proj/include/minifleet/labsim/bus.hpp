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

#ifndef MINIFLEET_LABSIM_BUS_HPP_
#define MINIFLEET_LABSIM_BUS_HPP_

#include <map>
#include <string>
#include <vector>

#include "minifleet/labsim/rng.hpp"
#include "minifleet/labsim/scenario.hpp"

namespace minifleet::labsim {

/// Abstract pub-sub transport with per-link latency, bounded uniform jitter
/// and loss. Jitter may reorder messages across links but never within one:
/// each link keeps a delivery watermark so later sends never overtake
/// earlier ones.
class MessageBus {
 public:
  struct Record {
    int link{0};
    int send_step{0};
    int deliver_step{-1};  // -1: lost
    std::string type;
    std::string text;
    int sequence{0};
  };

  explicit MessageBus(const NetworkModel& model) : model_(model) {}

  /// Registers a link with its own random stream (keyed so a vehicle's links
  /// draw identically regardless of fleet size).
  int add_link(const std::string& name, std::uint64_t seed,
               std::uint64_t vehicle_key, std::uint64_t direction_key);

  void send(int link, int step, const std::string& type,
            const std::string& text);

  /// Messages due at `step` on `link`, in send order.
  std::vector<std::string> deliver(int link, int step);

  const std::vector<Record>& log() const { return log_; }
  const std::string& link_name(int link) const { return links_[link].name; }

 private:
  struct Link {
    std::string name;
    RngStream rng;
    int watermark{-1};  // latest scheduled delivery on this link
    std::multimap<int, int> queue;  // deliver_step -> log index
  };

  NetworkModel model_;
  std::vector<Link> links_;
  std::vector<Record> log_;
};

}  // namespace minifleet::labsim

#endif  // MINIFLEET_LABSIM_BUS_HPP_
