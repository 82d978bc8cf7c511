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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "gtest/gtest.h"

namespace dptrack {
namespace {

constexpr int kNumSamples = 1000000;

// Reference SplitMix64 generator, written in its usual state-advancing form.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t state) : state_(state) {}
  uint64_t operator()() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  uint64_t state_;
};

TEST(RngStreamTest, SameSeedAndPathGiveSameSequence) {
  RngStream a = DeriveStream(7, {{EntityTag::kSite, 3}, {EntityTag::kRound, 0}});
  RngStream b = DeriveStream(7, {{EntityTag::kSite, 3}, {EntityTag::kRound, 0}});
  for (int i = 0; i < 100; ++i) ASSERT_EQ(a.Next(), b.Next()) << "draw " << i;
}

TEST(RngStreamTest, DifferentPathsDiffer) {
  RngStream a = DeriveStream(7, {{EntityTag::kSite, 3}});
  RngStream b = DeriveStream(7, {{EntityTag::kSite, 4}});
  EXPECT_NE(a.Next(), b.Next());
  RngStream c = DeriveStream(7, {{EntityTag::kSite, 3}});
  RngStream d = DeriveStream(7, {{EntityTag::kRound, 3}});
  EXPECT_NE(c.Next(), d.Next());
  EXPECT_NE(DeriveStream(7, {}).Next(), DeriveStream(8, {}).Next());
}

TEST(RngStreamTest, EmptyPathGoldenSequence) {
  // The empty-path stream is SplitMix64 keyed by the first SplitMix64 output
  // of the master seed.
  SplitMix64 seeder(7);
  SplitMix64 reference(seeder());
  RngStream stream = DeriveStream(7, {});
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(stream.Next(), reference()) << i;

  RngStream golden = DeriveStream(7, {});
  EXPECT_EQ(golden.key(), 0x63cbe1e459320dd7ULL);
  EXPECT_EQ(golden.Next(), 0xb8b4c2977eabce45ULL);
  EXPECT_EQ(golden.Next(), 0xa65305fd338ec8feULL);
  EXPECT_EQ(golden.Next(), 0x8ca3cbb6ca63129bULL);
  EXPECT_EQ(golden.Next(), 0x9aaf21d8296e1e3dULL);
  EXPECT_EQ(golden.Next(), 0x591a5ca9608cc826ULL);
  EXPECT_EQ(golden.position(), 5u);
}

TEST(RngStreamTest, SiblingStreamsUncorrelated) {
  constexpr int n = 200000;
  RngStream a = DeriveStream(11, {{EntityTag::kSite, 1}});
  RngStream b = DeriveStream(11, {{EntityTag::kSite, 2}});
  double sa = 0, sb = 0, sab = 0, saa = 0, sbb = 0;
  for (int i = 0; i < n; ++i) {
    const double x = a.NextUniform();
    const double y = b.NextUniform();
    sa += x;
    sb += y;
    sab += x * y;
    saa += x * x;
    sbb += y * y;
  }
  const double cov = sab / n - (sa / n) * (sb / n);
  const double corr = cov / std::sqrt((saa / n - (sa / n) * (sa / n)) *
                                      (sbb / n - (sb / n) * (sb / n)));
  // Under independence corr ~ N(0, 1/n); 5 sigma.
  EXPECT_LT(std::abs(corr), 5.0 / std::sqrt(n));
}

TEST(RngStreamTest, UniformInOpenInterval) {
  RngStream rng = DeriveStream(3, {});
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.NextUniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(LaplaceTest, DisabledReturnsZeroWithoutConsumingRandomness) {
  RngStream rng = DeriveStream(1, {});
  absl::StatusOr<double> x = SampleLaplace(rng, 4.0, NoiseMode::kDisabled);
  ASSERT_TRUE(x.ok());
  EXPECT_EQ(*x, 0.0);
  EXPECT_EQ(rng.position(), 0u);
}

TEST(LaplaceTest, RejectsBadScale) {
  RngStream rng = DeriveStream(1, {});
  EXPECT_EQ(SampleLaplace(rng, 0.0, NoiseMode::kStandard).status().code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_EQ(SampleLaplace(rng, -1.0, NoiseMode::kStandard).status().code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_EQ(SampleLaplace(rng, INFINITY, NoiseMode::kStandard).status().code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_FALSE(SampleLaplace(rng, 0.0, NoiseMode::kDisabled).ok());
}

TEST(LaplaceTest, MomentsAndTail) {
  RngStream rng = DeriveStream(2024, {{EntityTag::kProbe, 0}});
  double sum = 0, sum_sq = 0;
  int64_t tail = 0;
  for (int i = 0; i < kNumSamples; ++i) {
    const double x = *SampleLaplace(rng, 1.0, NoiseMode::kStandard);
    sum += x;
    sum_sq += x * x;
    tail += std::abs(x) > 3.0 ? 1 : 0;
  }
  const double mean = sum / kNumSamples;
  const double var = sum_sq / kNumSamples - mean * mean;
  EXPECT_NEAR(mean, 0.0, 0.01);
  EXPECT_GE(var, 1.9);
  EXPECT_LE(var, 2.1);
  EXPECT_NEAR(static_cast<double>(tail) / kNumSamples, std::exp(-3.0), 0.005);
}

TEST(LaplaceTest, KolmogorovSmirnov) {
  constexpr int n = 100000;
  for (double scale : {0.5, 1.0, 4.0}) {
    RngStream rng = DeriveStream(99, {{EntityTag::kProbe, 1}});
    std::vector<double> xs(n);
    for (double& x : xs) x = *SampleLaplace(rng, scale, NoiseMode::kStandard);
    std::sort(xs.begin(), xs.end());
    double d = 0;
    for (int i = 0; i < n; ++i) {
      // Independent closed form of the Laplace CDF.
      const double x = xs[i] / scale;
      const double f = x < 0 ? 0.5 * std::exp(x) : 1 - 0.5 * std::exp(-x);
      ASSERT_NEAR(LaplaceCdf(xs[i], scale), f, 1e-12);
      d = std::max({d, f - static_cast<double>(i) / n,
                    static_cast<double>(i + 1) / n - f});
    }
    // Asymptotic critical value at significance 0.01.
    EXPECT_LT(d, 1.628 / std::sqrt(static_cast<double>(n))) << "scale " << scale;
  }
}

TEST(UniformThresholdTest, SingletonSupport) {
  RngStream rng = DeriveStream(5, {});
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(*SampleUniformThreshold(rng, 1), 1);
}

TEST(UniformThresholdTest, RejectsEmptySupport) {
  RngStream rng = DeriveStream(5, {});
  EXPECT_EQ(SampleUniformThreshold(rng, 0).status().code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_FALSE(SampleUniformThreshold(rng, -3).ok());
}

TEST(UniformThresholdTest, FrequenciesAndSupport) {
  constexpr int n = 100000;
  RngStream rng = DeriveStream(6, {});
  std::vector<int> counts(5, 0);
  for (int i = 0; i < n; ++i) {
    const int64_t r = *SampleUniformThreshold(rng, 4);
    ASSERT_GE(r, 1);
    ASSERT_LE(r, 4);
    ++counts[r];
  }
  for (int v = 1; v <= 4; ++v) {
    EXPECT_NEAR(static_cast<double>(counts[v]) / n, 0.25, 0.01) << "value " << v;
  }
  for (int i = 0; i < 10000; ++i) {
    const int64_t r = *SampleUniformThreshold(rng, 10);
    ASSERT_GE(r, 1);
    ASSERT_LE(r, 10);
  }
}

TEST(UniformThresholdTest, LargeSupportIsUnbiasedInMean) {
  constexpr int n = 200000;
  const int64_t delta = (int64_t{1} << 40) + 12345;
  RngStream rng = DeriveStream(8, {});
  double sum = 0;
  for (int i = 0; i < n; ++i) {
    sum += static_cast<double>(*SampleUniformThreshold(rng, delta)) /
           static_cast<double>(delta);
  }
  // Mean of r/delta is (delta+1)/(2 delta); sd of the mean about 0.29/sqrt(n).
  EXPECT_NEAR(sum / n, 0.5, 5 * 0.29 / std::sqrt(n));
}

}  // namespace
}  // namespace dptrack
