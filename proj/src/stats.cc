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

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/strings/str_join.h"
#include "boost/math/distributions/normal.hpp"

namespace dptrack {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double SafeLog(double num, double den) {
  if (num <= 0 && den <= 0) return 0;
  if (num <= 0) return -kInf;
  if (den <= 0) return kInf;
  return std::log(num / den);
}

}  // namespace

Interval WilsonInterval(int64_t successes, int64_t trials, double z) {
  if (trials <= 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2 * n)) / denom;
  const double half =
      z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

double SimultaneousZ(double level, int64_t tests) {
  const double per_test = (1.0 - level) / static_cast<double>(std::max<int64_t>(1, tests));
  boost::math::normal_distribution<double> normal;
  return boost::math::quantile(boost::math::complement(normal, per_test / 2));
}

PrivacyProbeReport CompareEventHistograms(const EventCounts& a,
                                          int64_t trials_a,
                                          const EventCounts& b,
                                          int64_t trials_b, double epsilon,
                                          int64_t min_count, double level) {
  PrivacyProbeReport report;
  report.epsilon = epsilon;
  report.trials_a = trials_a;
  report.trials_b = trials_b;

  std::map<EventKey, std::pair<int64_t, int64_t>> merged;
  for (const auto& [key, count] : a) merged[key].first += count;
  for (const auto& [key, count] : b) merged[key].second += count;

  for (const auto& [key, counts] : merged) {
    if (counts.first + counts.second < min_count) continue;
    EventComparison c;
    c.event = key;
    c.count_a = counts.first;
    c.count_b = counts.second;
    report.events.push_back(std::move(c));
  }
  report.events_tested = static_cast<int64_t>(report.events.size());
  const double z = SimultaneousZ(level, report.events_tested);

  for (EventComparison& c : report.events) {
    const double pa = static_cast<double>(c.count_a) / trials_a;
    const double pb = static_cast<double>(c.count_b) / trials_b;
    const Interval ia = WilsonInterval(c.count_a, trials_a, z);
    const Interval ib = WilsonInterval(c.count_b, trials_b, z);
    c.log_ratio = SafeLog(pa, pb);
    c.ci = {SafeLog(ia.lower, ib.upper), SafeLog(ia.upper, ib.lower)};
    c.abs_lower = std::max(c.ci.lower, -c.ci.upper);
    c.violation = c.abs_lower > epsilon;
    report.violation = report.violation || c.violation;
    report.max_abs_log_ratio =
        std::max(report.max_abs_log_ratio, std::abs(c.log_ratio));
    if (c.abs_lower >= report.max_abs_lower) {
      report.max_abs_lower = c.abs_lower;
      report.half_width = (c.ci.upper - c.ci.lower) / 2;
    }
  }
  return report;
}

double FitPowerLawExponent(std::span<const double> x, std::span<const double> y) {
  const size_t n = std::min(x.size(), y.size());
  if (n < 2) return 0;
  double mx = 0, my = 0;
  for (size_t i = 0; i < n; ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (size_t i = 0; i < n; ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxx > 0 ? sxy / sxx : 0;
}

double EmpiricalQuantile(std::vector<double> values, double q) {
  if (values.empty()) return 0;
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const size_t lo = static_cast<size_t>(std::floor(pos));
  const size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] * (1 - frac) + values[hi] * frac;
}

std::string FormatEventKey(const EventKey& key) {
  return absl::StrCat("[", absl::StrJoin(key, ","), "]");
}

}  // namespace dptrack
