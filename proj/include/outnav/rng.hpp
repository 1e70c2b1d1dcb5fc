// Copyright 2026 The outnav Authors
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

// Seed-stream derivation. Every stochastic quantity in the simulator is drawn
// from a generator seeded by derive_seed(parent, stream, index), so results
// depend only on (seed, stream, step) and never on evaluation order.

#ifndef OUTNAV_RNG_HPP
#define OUTNAV_RNG_HPP

#include <cstdint>
#include <random>

namespace outnav {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Named sub-streams so unrelated consumers never share draws.
enum class Stream : std::uint64_t {
  kEpisode = 1,
  kLidar = 2,
  kImu = 3,
  kJoints = 4,
  kSurfaceNoise = 5,
  kClassifier = 6,
  kScenario = 7,
  kCalibration = 8,
};

inline std::uint64_t derive_seed(std::uint64_t parent, Stream stream,
                                 std::uint64_t index = 0) {
  std::uint64_t h = splitmix64(parent);
  h = splitmix64(h ^ static_cast<std::uint64_t>(stream));
  return splitmix64(h ^ (index * 0x2545f4914f6cdd1dULL));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double normal(double mean, double stddev) {
    if (stddev <= 0.0) return mean;
    return std::normal_distribution<double>(mean, stddev)(engine_);
  }
  double exponential(double rate) {
    return std::exponential_distribution<double>(rate)(engine_);
  }
  int uniform_int(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(engine_);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace outnav

#endif  // OUTNAV_RNG_HPP
