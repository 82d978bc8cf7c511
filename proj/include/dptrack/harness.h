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

// The experiment loop: an adversary and a tracker alternate for a fixed item
// budget, the true count is tracked alongside, and per-trial metrics are
// collected and aggregated.

#ifndef DPTRACK_HARNESS_H_
#define DPTRACK_HARNESS_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dptrack/adversaries.h"
#include "dptrack/noise.h"
#include "dptrack/stats.h"
#include "dptrack/tracking_core.h"

namespace dptrack {

enum class MechanismKind { kRobust, kOblivious, kDeterministic };

struct AdversarySpec {
  enum class Kind { kReplay, kStopOnFire, kUpdateChaser };
  Kind kind = Kind::kReplay;
  ReplaySchedule schedule;  // kReplay only
};

struct ExperimentConfig {
  MechanismKind mechanism = MechanismKind::kRobust;
  AdversarySpec adversary;
  int32_t k = 16;
  double alpha = 0.1;
  double delta = 0.05;
  int64_t items = 1000000;
  int64_t trials = 100;
  uint64_t seed = 42;
  NoiseMode noise_mode = NoiseMode::kStandard;
  // Block-size constant of the oblivious baseline.
  int64_t c0 = 8;
  // Error is measured once N_t reaches this count; defaults to ErrorFloor().
  std::optional<int64_t> n_floor;
  int workers = 1;
};

absl::Status ValidateConfig(const ExperimentConfig& config);

// Per-round failure probability of the robust tracker for this config.
absl::StatusOr<double> ConfigBeta(const ExperimentConfig& config);

// Smallest N_t at which relative error is measured.
absl::StatusOr<int64_t> ErrorFloor(const ExperimentConfig& config);

absl::StatusOr<std::unique_ptr<Tracker>> MakeTracker(const ExperimentConfig& config,
                                                     uint64_t trial_seed);
absl::StatusOr<std::unique_ptr<Adversary>> MakeAdversary(
    const ExperimentConfig& config, uint64_t trial_seed);

struct ErrorSample {
  int64_t t = 0;
  int64_t n = 0;
  double a = 0;
};

struct RoundMetrics {
  int64_t n0 = 0;
  int64_t delta = 0;
  int64_t bits = 0;
  std::vector<int64_t> phase_bits;
  int64_t releases = 0;
  int64_t leaks = 0;
  bool ended_by_signal = false;
};

struct TrialMetrics {
  int64_t trial = 0;
  uint64_t seed = 0;
  int64_t n_items = 0;
  double max_rel_error = 0;
  bool failed = false;
  std::vector<ErrorSample> error_samples;
  CommLedger ledger;
  int64_t rounds = 0;
  // Robust mechanism only: completed rounds.
  std::vector<RoundMetrics> round_metrics;
  // Robust mechanism only: largest leak set of any round, including the
  // round still open when the budget ran out.
  int64_t max_leaks_per_round = 0;
};

struct TrialResult {
  Transcript transcript;
  // Robust mechanism only; aligned with the transcript.
  std::vector<ItemLogEntry> item_log;
  TrialMetrics metrics;
};

absl::StatusOr<TrialResult> RunTrial(const ExperimentConfig& config,
                                     int64_t trial);

struct AggregateReport {
  ExperimentConfig config;
  int64_t n_floor = 0;
  std::vector<TrialMetrics> trials;
  int64_t failures = 0;
  double failure_fraction = 0;
  Interval failure_ci;  // Wilson 95%
  double mean_total_words = 0;
  int64_t max_total_words = 0;
  double mean_max_rel_error = 0;
};

// Runs trials 0..trials-1 on config.workers threads. The report does not
// depend on the number of workers.
absl::StatusOr<AggregateReport> RunTrials(const ExperimentConfig& config);

std::string MechanismName(MechanismKind kind);
std::string AdversaryName(const AdversarySpec& spec);

// One row per trial: trial, seed, mechanism, adversary, k, alpha, delta,
// n_items, max_rel_error, failed, total_words, rounds.
void WriteTrialsCsv(const AggregateReport& report, std::ostream& out);
void WriteSummaryJson(const AggregateReport& report, std::ostream& out);

struct SweepRow {
  int32_t k = 0;
  double alpha = 0;
  MechanismKind mechanism = MechanismKind::kRobust;
  double mean_total_words = 0;
  double failure_fraction = 0;
};

// Cartesian product of ks x alphas x mechanisms over `base`, in that nesting
// order. Each point keeps base.seed.
absl::StatusOr<std::vector<SweepRow>> RunSweep(
    const ExperimentConfig& base, const std::vector<int32_t>& ks,
    const std::vector<double>& alphas,
    const std::vector<MechanismKind>& mechanisms);

// Columns: k, alpha, mechanism, mean_total_words, failure_fraction.
void WriteSweepCsv(const std::vector<SweepRow>& rows, std::ostream& out);

}  // namespace dptrack

#endif  // DPTRACK_HARNESS_H_
