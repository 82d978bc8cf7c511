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

// Small statistics helpers shared by the privacy probes and the harness.

#ifndef DPTRACK_STATS_H_
#define DPTRACK_STATS_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace dptrack {

struct Interval {
  double lower = 0;
  double upper = 0;
};

// Wilson score interval for a binomial proportion at normal quantile z.
Interval WilsonInterval(int64_t successes, int64_t trials, double z);

// Two-sided normal quantile for confidence `level` shared across `tests`
// simultaneous intervals (Bonferroni).
double SimultaneousZ(double level, int64_t tests);

// A discretized event of a randomized output: an opaque key.
using EventKey = std::vector<int64_t>;
using EventCounts = std::map<EventKey, int64_t>;

struct EventComparison {
  EventKey event;
  int64_t count_a = 0;
  int64_t count_b = 0;
  // log(P_a[E] / P_b[E]); +/-inf when one side is empty.
  double log_ratio = 0;
  // Simultaneous confidence interval for log_ratio.
  Interval ci;
  // max(ci.lower, -ci.upper): a lower confidence bound on |log_ratio|.
  double abs_lower = 0;
  bool violation = false;
};

struct PrivacyProbeReport {
  double epsilon = 0;
  int64_t trials_a = 0;
  int64_t trials_b = 0;
  int64_t events_tested = 0;
  // Largest |log ratio| point estimate among tested events.
  double max_abs_log_ratio = 0;
  // Largest lower confidence bound on |log ratio| among tested events.
  double max_abs_lower = 0;
  // Half-width of the confidence interval of the event attaining
  // max_abs_lower (infinite if a count is zero).
  double half_width = 0;
  bool violation = false;
  std::vector<EventComparison> events;
};

// Compares two event histograms built from `trials_a` and `trials_b`
// independent runs. Events with count_a + count_b < min_count are skipped.
// Every tested event gets a simultaneous (Bonferroni) Wilson-based interval
// at confidence `level`; a violation is any event whose lower bound on
// |log ratio| exceeds epsilon.
PrivacyProbeReport CompareEventHistograms(const EventCounts& a,
                                          int64_t trials_a,
                                          const EventCounts& b,
                                          int64_t trials_b, double epsilon,
                                          int64_t min_count,
                                          double level = 0.95);

// Least-squares slope of log(y) against log(x).
double FitPowerLawExponent(std::span<const double> x, std::span<const double> y);

// Empirical quantile (linear interpolation between order statistics).
double EmpiricalQuantile(std::vector<double> values, double q);

std::string FormatEventKey(const EventKey& key);

}  // namespace dptrack

#endif  // DPTRACK_STATS_H_
