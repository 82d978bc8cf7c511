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

#include "dptrack/noise.h"

#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace dptrack {
namespace {

constexpr uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// SplitMix64 finalizer.
constexpr uint64_t Mix(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

uint64_t HashPath(uint64_t master_seed, std::span<const PathElement> path) {
  uint64_t h = Mix(master_seed + kGolden);
  for (const PathElement& e : path) {
    uint64_t tag = static_cast<uint64_t>(e.tag);
    h = Mix(h ^ Mix((tag << 48) + kGolden * (tag + 1)));
    h = Mix(h ^ Mix(e.index + kGolden));
  }
  return h;
}

}  // namespace

uint64_t RngStream::Next() {
  ++counter_;
  return Mix(key_ + counter_ * kGolden);
}

double RngStream::NextUniform() {
  // 53 random bits, centered in their cell so 0 and 1 are never produced.
  return (static_cast<double>(Next() >> 11) + 0.5) * 0x1.0p-53;
}

RngStream DeriveStream(uint64_t master_seed, std::span<const PathElement> path) {
  return RngStream(HashPath(master_seed, path));
}

RngStream DeriveStream(uint64_t master_seed,
                       std::initializer_list<PathElement> path) {
  return DeriveStream(master_seed,
                      std::span<const PathElement>(path.begin(), path.size()));
}

uint64_t DeriveSeed(uint64_t master_seed,
                    std::initializer_list<PathElement> path) {
  return HashPath(master_seed,
                  std::span<const PathElement>(path.begin(), path.size()));
}

absl::StatusOr<double> SampleLaplace(RngStream& rng, double scale,
                                     NoiseMode mode) {
  if (!(scale > 0) || !std::isfinite(scale)) {
    return absl::InvalidArgumentError(
        absl::StrCat("Laplace scale must be positive and finite, got ", scale));
  }
  if (mode == NoiseMode::kDisabled) return 0.0;
  const double u = rng.NextUniform();
  if (u < 0.5) return scale * std::log(2.0 * u);
  return -scale * std::log(2.0 * (1.0 - u));
}

absl::StatusOr<int64_t> SampleUniformThreshold(RngStream& rng, int64_t delta) {
  if (delta < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("threshold support size must be >= 1, got ", delta));
  }
  // Lemire's multiply-shift with rejection; unbiased for every delta.
  const uint64_t range = static_cast<uint64_t>(delta);
  unsigned __int128 m = static_cast<unsigned __int128>(rng.Next()) * range;
  uint64_t low = static_cast<uint64_t>(m);
  if (low < range) {
    const uint64_t floor = (0 - range) % range;
    while (low < floor) {
      m = static_cast<unsigned __int128>(rng.Next()) * range;
      low = static_cast<uint64_t>(m);
    }
  }
  return static_cast<int64_t>(m >> 64) + 1;
}

double LaplaceCdf(double x, double scale) {
  if (x < 0) return 0.5 * std::exp(x / scale);
  return 1.0 - 0.5 * std::exp(-x / scale);
}

}  // namespace dptrack
