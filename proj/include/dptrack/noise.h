// Copyright 2026 The dptrack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DPTRACK_NOISE_H_
#define DPTRACK_NOISE_H_

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <span>
#include <vector>

#include "absl/status/statusor.h"

namespace dptrack {

enum class NoiseMode { kStandard, kDisabled };

// Identifies the owner of a derived random stream. Values are part of the
// stream derivation and must never be renumbered.
enum class EntityTag : uint32_t {
  kTrial = 1,
  kSite = 2,
  kRound = 3,
  kServer = 4,
  kPhase = 5,
  kBinaryMechanism = 6,
  kAdversary = 7,
  kAudit = 8,
  kDatabase = 9,
  kProbe = 10,
};

struct PathElement {
  EntityTag tag;
  uint64_t index;
};

using EntityPath = std::vector<PathElement>;

// Counter-based pseudo-random stream. The stream key is a hash of the master
// seed and the entity path; the i-th output is a hash of (key, i). Streams are
// cheap value types and carry no shared state.
class RngStream {
 public:
  using result_type = uint64_t;

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() { return Next(); }

  uint64_t Next();

  // Uniform double in the open interval (0, 1).
  double NextUniform();

  uint64_t key() const { return key_; }
  uint64_t position() const { return counter_; }

 private:
  friend RngStream DeriveStream(uint64_t, std::span<const PathElement>);
  explicit RngStream(uint64_t key) : key_(key) {}

  uint64_t key_;
  uint64_t counter_ = 0;
};

RngStream DeriveStream(uint64_t master_seed, std::span<const PathElement> path);
RngStream DeriveStream(uint64_t master_seed,
                       std::initializer_list<PathElement> path);

// Hash of (seed, path) used for per-trial seeds reported in outputs.
uint64_t DeriveSeed(uint64_t master_seed, std::initializer_list<PathElement> path);

// Draws from Lap(scale): density exp(-|x|/scale) / (2 scale). Returns exactly 0
// when `mode` is kDisabled (without consuming randomness).
absl::StatusOr<double> SampleLaplace(RngStream& rng, double scale,
                                     NoiseMode mode);

// Uniform integer in {1, ..., delta}.
absl::StatusOr<int64_t> SampleUniformThreshold(RngStream& rng, int64_t delta);

// Laplace CDF at x for Lap(scale), used by goodness-of-fit checks.
double LaplaceCdf(double x, double scale);

}  // namespace dptrack

#endif  // DPTRACK_NOISE_H_
