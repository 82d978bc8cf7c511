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

#include "dptrack/binary_mechanism.h"

#include <bit>
#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace dptrack {

int BinaryMechanismLevels(int64_t capacity) {
  return std::max(1, static_cast<int>(std::bit_width(static_cast<uint64_t>(capacity))));
}

BinaryMechanism::BinaryMechanism(int64_t capacity, double epsilon,
                                 NoiseMode mode)
    : capacity_(capacity),
      epsilon_(epsilon),
      level_epsilon_(epsilon / BinaryMechanismLevels(capacity)),
      mode_(mode),
      exact_(BinaryMechanismLevels(capacity), 0.0),
      noisy_(BinaryMechanismLevels(capacity), 0.0) {}

absl::StatusOr<BinaryMechanism> BinaryMechanism::Create(int64_t capacity,
                                                        double epsilon,
                                                        NoiseMode mode) {
  if (capacity < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("binary mechanism capacity must be >= 1, got ", capacity));
  }
  if (!(epsilon > 0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrCat("binary mechanism epsilon must be positive, got ", epsilon));
  }
  return BinaryMechanism(capacity, epsilon, mode);
}

absl::StatusOr<double> BinaryMechanism::Feed(double x, RngStream& rng) {
  if (steps_ >= capacity_) {
    return absl::OutOfRangeError(
        absl::StrCat("binary mechanism capacity ", capacity_, " exhausted"));
  }
  const uint64_t t = static_cast<uint64_t>(++steps_);
  const int i = std::countr_zero(t);
  double sum = x;
  for (int j = 0; j < i; ++j) {
    sum += exact_[j];
    exact_[j] = 0;
    noisy_[j] = 0;
  }
  exact_[i] = sum;
  absl::StatusOr<double> noise = SampleLaplace(rng, 1.0 / level_epsilon_, mode_);
  if (!noise.ok()) return noise.status();
  noisy_[i] = sum + *noise;

  double estimate = 0;
  for (uint64_t bits = t; bits != 0; bits &= bits - 1) {
    estimate += noisy_[std::countr_zero(bits)];
  }
  return estimate;
}

absl::StatusOr<PrivacyProbeReport> ProbeBinaryMechanismPrivacy(
    int64_t capacity, double epsilon, std::span<const double> stream_a,
    std::span<const double> stream_b, const BmProbeOptions& options) {
  if (stream_a.size() != stream_b.size() ||
      static_cast<int64_t>(stream_a.size()) != capacity) {
    return absl::InvalidArgumentError(
        "probe streams must both have length equal to the capacity");
  }
  int differing = 0;
  for (size_t t = 0; t < stream_a.size(); ++t) {
    const double diff = std::abs(stream_a[t] - stream_b[t]);
    if (diff == 0) continue;
    ++differing;
    if (diff > 1) {
      return absl::InvalidArgumentError(
          absl::StrCat("probe streams differ by ", diff, " at position ", t + 1));
    }
  }
  if (differing > 1) {
    return absl::InvalidArgumentError(absl::StrCat(
        "probe streams must differ in at most one position, got ", differing));
  }
  if (options.trials < 1 || !(options.bucket_width > 0)) {
    return absl::InvalidArgumentError("probe needs trials >= 1 and bucket_width > 0");
  }

  auto histogram = [&](std::span<const double> stream,
                       uint64_t side) -> absl::StatusOr<EventCounts> {
    EventCounts counts;
    // Joint events are tagged 1, per-step marginals {0, t, bucket}.
    EventKey key(stream.size() + 1);
    key[0] = 1;
    for (int64_t trial = 0; trial < options.trials; ++trial) {
      RngStream rng = DeriveStream(
          options.seed, {{EntityTag::kProbe, side},
                         {EntityTag::kTrial, static_cast<uint64_t>(trial)}});
      absl::StatusOr<BinaryMechanism> bm =
          BinaryMechanism::Create(capacity, epsilon, options.noise_mode);
      if (!bm.ok()) return bm.status();
      for (size_t t = 0; t < stream.size(); ++t) {
        absl::StatusOr<double> out = bm->Feed(stream[t], rng);
        if (!out.ok()) return out.status();
        key[t + 1] = static_cast<int64_t>(
            std::floor((*out - options.bucket_origin) / options.bucket_width));
        ++counts[{0, static_cast<int64_t>(t + 1), key[t + 1]}];
      }
      ++counts[key];
    }
    return counts;
  };

  absl::StatusOr<EventCounts> a = histogram(stream_a, 0);
  if (!a.ok()) return a.status();
  absl::StatusOr<EventCounts> b = histogram(stream_b, 1);
  if (!b.ok()) return b.status();
  return CompareEventHistograms(*a, options.trials, *b, options.trials, epsilon,
                                options.min_count, options.level);
}

}  // namespace dptrack
