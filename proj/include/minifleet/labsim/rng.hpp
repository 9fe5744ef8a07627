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

#ifndef MINIFLEET_LABSIM_RNG_HPP_
#define MINIFLEET_LABSIM_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

// Keyed random streams. Every noise source in the simulation owns a stream
// keyed by (run seed, vehicle id, purpose tag), so a vehicle's draws are
// independent of how many other vehicles exist — the fleet-isolation
// contract. Distribution mapping is done here rather than with
// std::*_distribution so draws are identical across standard libraries.

namespace minifleet::labsim {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

class RngStream {
 public:
  static RngStream keyed(std::uint64_t seed, std::string_view tag,
                         std::uint64_t a = 0, std::uint64_t b = 0) {
    std::uint64_t mix = seed;
    for (unsigned char c : tag) {
      mix ^= c;
      splitmix64(mix);
    }
    mix ^= 0x5bf03635ull * (a + 1);
    splitmix64(mix);
    mix ^= 0x9d2c5680ull * (b + 1);
    std::seed_seq seq{static_cast<std::uint32_t>(mix),
                      static_cast<std::uint32_t>(mix >> 32),
                      static_cast<std::uint32_t>(a),
                      static_cast<std::uint32_t>(b)};
    RngStream stream;
    stream.engine_.seed(seq);
    return stream;
  }

  // Uniform in [0, 1).
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
  }

  // Box-Muller without pair caching; two engine draws per sample.
  double normal(double sigma) {
    const double u1 =
        (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
    const double u2 = uniform01();
    return sigma * std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * M_PI * u2);
  }

  // Uniform integer in [0, n]; multiply-high mapping.
  std::uint64_t bounded(std::uint64_t n) {
    const unsigned __int128 product =
        static_cast<unsigned __int128>(engine_()) * (n + 1);
    return static_cast<std::uint64_t>(product >> 64);
  }

  bool bernoulli(double probability) { return uniform01() < probability; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace minifleet::labsim

#endif  // MINIFLEET_LABSIM_RNG_HPP_
