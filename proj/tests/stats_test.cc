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

#include "dptrack/stats.h"

#include <cmath>
#include <vector>

#include "gtest/gtest.h"

namespace dptrack {
namespace {

TEST(WilsonIntervalTest, MatchesClosedForm) {
  // 10 of 100 at z = 1.96; score interval solved as a quadratic in p.
  const double z = 1.96, n = 100, phat = 0.1;
  const double a = 1 + z * z / n;
  const double b = -(2 * phat + z * z / n);
  const double c = phat * phat;
  const double disc = std::sqrt(b * b - 4 * a * c);
  const Interval ci = WilsonInterval(10, 100, z);
  EXPECT_NEAR(ci.lower, (-b - disc) / (2 * a), 1e-12);
  EXPECT_NEAR(ci.upper, (-b + disc) / (2 * a), 1e-12);
}

TEST(WilsonIntervalTest, EdgeCases) {
  const Interval zero = WilsonInterval(0, 50, 1.96);
  EXPECT_EQ(zero.lower, 0.0);
  EXPECT_GT(zero.upper, 0.0);
  const Interval all = WilsonInterval(50, 50, 1.96);
  EXPECT_LT(all.lower, 1.0);
  EXPECT_EQ(all.upper, 1.0);
  const Interval none = WilsonInterval(0, 0, 1.96);
  EXPECT_EQ(none.lower, 0.0);
  EXPECT_EQ(none.upper, 1.0);
}

TEST(SimultaneousZTest, Quantiles) {
  EXPECT_NEAR(SimultaneousZ(0.95, 1), 1.959963984540054, 1e-9);
  // Two tests at 95% each get 97.5% two-sided: z = 2.2414.
  EXPECT_NEAR(SimultaneousZ(0.95, 2), 2.241402727604947, 1e-9);
  EXPECT_LT(SimultaneousZ(0.95, 10), SimultaneousZ(0.95, 100));
}

TEST(CompareEventHistogramsTest, IdenticalHistogramsNoViolation) {
  EventCounts a = {{{0}, 5000}, {{1}, 3000}, {{2}, 2000}};
  PrivacyProbeReport r = CompareEventHistograms(a, 10000, a, 10000, 0.1, 100);
  EXPECT_EQ(r.events_tested, 3);
  EXPECT_FALSE(r.violation);
  EXPECT_EQ(r.max_abs_log_ratio, 0.0);
  EXPECT_EQ(r.max_abs_lower, 0.0);
}

TEST(CompareEventHistogramsTest, DisjointSupportIsViolation) {
  EventCounts a = {{{0}, 1000}};
  EventCounts b = {{{1}, 1000}};
  PrivacyProbeReport r = CompareEventHistograms(a, 1000, b, 1000, 5.0, 100);
  EXPECT_TRUE(r.violation);
  EXPECT_TRUE(std::isinf(r.max_abs_log_ratio));
}

TEST(CompareEventHistogramsTest, SkipsRareEvents) {
  EventCounts a = {{{0}, 990}, {{1}, 10}};
  EventCounts b = {{{0}, 1000}};
  PrivacyProbeReport r = CompareEventHistograms(a, 1000, b, 1000, 0.5, 100);
  EXPECT_EQ(r.events_tested, 1);
  EXPECT_FALSE(r.violation);
}

TEST(CompareEventHistogramsTest, LogRatioAndInterval) {
  EventCounts a = {{{0}, 6000}, {{1}, 4000}};
  EventCounts b = {{{0}, 4000}, {{1}, 6000}};
  PrivacyProbeReport r = CompareEventHistograms(a, 10000, b, 10000, 0.2, 100);
  ASSERT_EQ(r.events.size(), 2u);
  EXPECT_NEAR(r.events[0].log_ratio, std::log(1.5), 1e-12);
  EXPECT_LT(r.events[0].ci.lower, std::log(1.5));
  EXPECT_GT(r.events[0].ci.upper, std::log(1.5));
  // log 1.5 = 0.405 with ~0.06 of slack is well above 0.2.
  EXPECT_TRUE(r.violation);
  EXPECT_NEAR(r.max_abs_log_ratio, std::log(1.5), 1e-12);
}

TEST(FitPowerLawExponentTest, RecoversExponent) {
  std::vector<double> x = {4, 16, 64};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * std::pow(v, 0.6));
  EXPECT_NEAR(FitPowerLawExponent(x, y), 0.6, 1e-12);
}

TEST(EmpiricalQuantileTest, LinearInterpolation) {
  EXPECT_EQ(EmpiricalQuantile({3, 1, 2, 4, 5}, 0.5), 3.0);
  EXPECT_EQ(EmpiricalQuantile({1, 2}, 0.5), 1.5);
  EXPECT_EQ(EmpiricalQuantile({1, 2, 3, 4, 5}, 1.0), 5.0);
  EXPECT_EQ(EmpiricalQuantile({}, 0.5), 0.0);
}

TEST(FormatEventKeyTest, Brackets) {
  EXPECT_EQ(FormatEventKey({1, -2, 3}), "[1,-2,3]");
  EXPECT_EQ(FormatEventKey({}), "[]");
}

}  // namespace
}  // namespace dptrack
