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

#ifndef DPTRACK_BINARY_MECHANISM_H_
#define DPTRACK_BINARY_MECHANISM_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "dptrack/noise.h"
#include "dptrack/stats.h"

namespace dptrack {

// Number of dyadic levels touched by a stream of length `capacity`, i.e. the
// number of bits needed to write `capacity`. Every input position lands in
// exactly one live partial sum per level.
int BinaryMechanismLevels(int64_t capacity);

// Binary (dyadic tree) mechanism releasing running sums of a length-L stream
// of reals under epsilon-differential privacy. Each level partial sum is
// released once with Lap(1/eps') noise, eps' = eps / levels.
class BinaryMechanism {
 public:
  static absl::StatusOr<BinaryMechanism> Create(int64_t capacity,
                                                double epsilon,
                                                NoiseMode mode = NoiseMode::kStandard);

  // Consumes the next input and returns the private running-sum estimate.
  absl::StatusOr<double> Feed(double x, RngStream& rng);

  int64_t capacity() const { return capacity_; }
  int64_t steps() const { return steps_; }
  double epsilon() const { return epsilon_; }
  double level_epsilon() const { return level_epsilon_; }
  int levels() const { return static_cast<int>(exact_.size()); }

  std::span<const double> exact_levels() const { return exact_; }
  std::span<const double> noisy_levels() const { return noisy_; }

 private:
  BinaryMechanism(int64_t capacity, double epsilon, NoiseMode mode);

  int64_t capacity_;
  double epsilon_;
  double level_epsilon_;
  NoiseMode mode_;
  int64_t steps_ = 0;
  std::vector<double> exact_;
  std::vector<double> noisy_;
};

struct BmProbeOptions {
  int64_t trials = 100000;
  double bucket_width = 1.0;
  // Buckets are floor((output - bucket_origin) / bucket_width).
  double bucket_origin = 0.0;
  int64_t min_count = 100;
  double level = 0.95;
  NoiseMode noise_mode = NoiseMode::kStandard;
  uint64_t seed = 1;
};

// Monte-Carlo probe of the privacy loss between two neighboring input
// streams. Each trial runs the mechanism over a whole stream. Two families
// of events are compared: the joint vector of bucketed outputs, keyed
// {1, b_1, ..., b_L}, and the bucket of each single output, keyed {0, t, b_t}.
// Streams must have length L and differ in at most one position by at most 1.
absl::StatusOr<PrivacyProbeReport> ProbeBinaryMechanismPrivacy(
    int64_t capacity, double epsilon, std::span<const double> stream_a,
    std::span<const double> stream_b, const BmProbeOptions& options);

}  // namespace dptrack

#endif  // DPTRACK_BINARY_MECHANISM_H_
