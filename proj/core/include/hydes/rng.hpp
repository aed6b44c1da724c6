// Copyright 2026 The HyDeS Authors
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

#pragma once

#include <cstdint>
#include <vector>

namespace hydes {

/// splitmix64 mixing step. Used both as a standalone stream (advancing the
/// state by the golden-ratio increment) and to expand one seed word into the
/// xoshiro state.
uint64_t splitmix64(uint64_t& state);

/// Derives an independent substream seed from (run_seed, index). This is the
/// documented derivation every component uses to hand seeds to workers:
/// two splitmix64 steps over run_seed XOR a mixed index.
uint64_t derive_seed(uint64_t run_seed, uint64_t index);

/// xoshiro256++ generator with explicit seeding and hand-rolled
/// distributions. Distributions are implemented here rather than through
/// <random> so that identical seeds yield identical streams on every
/// platform and standard library.
class Rng {
 public:
  explicit Rng(uint64_t seed);

  uint64_t next_u64();

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform in [lo, hi).
  double uniform(double lo, double hi);
  /// Uniform integer in [0, n). n must be > 0.
  uint64_t uniform_index(uint64_t n);

  /// Standard normal via Box-Muller (two uniforms per draw; the sine
  /// companion is discarded to keep the generator stateless across calls).
  double normal();

  /// Gamma(alpha, 1), alpha > 0. Marsaglia-Tsang squeeze for alpha >= 1,
  /// boosted by U^(1/alpha) below 1.
  double gamma(double alpha);

  /// Beta(a, b) via two gamma draws.
  double beta(double a, double b);

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (size_t i = items.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(uniform_index(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  uint64_t state_[4];
};

}  // namespace hydes
