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

// Privacy bookkeeping for the robust tracker.
//
// The thresholds of all sites form the protected database. Every released
// estimate is triggered by a bit from the site that received the current
// item, which exposes the threshold of that site's active block; those
// (site, block) pairs form the leak set of a transcript. The tracker is meant
// to be differentially private with respect to every threshold outside the
// leak set. The audit here is an empirical falsification probe of that
// property on small configurations: it pins two neighboring databases and a
// deterministic adversary, drops transcripts that leak the differing
// threshold, and compares bucketed transcript histograms. It cannot certify
// privacy.

#ifndef DPTRACK_PRIVACY_AUDIT_H_
#define DPTRACK_PRIVACY_AUDIT_H_

#include <compare>
#include <cstdint>
#include <ostream>
#include <set>
#include <span>
#include <utility>

#include "absl/status/statusor.h"
#include "dptrack/noise.h"
#include "dptrack/robust_tracker.h"
#include "dptrack/stats.h"
#include "dptrack/tracking_core.h"

namespace dptrack {

struct LeakEntry {
  int64_t round = 0;
  int32_t site = 0;
  int64_t block = 0;

  friend auto operator<=>(const LeakEntry&, const LeakEntry&) = default;
};

class LeakSet {
 public:
  void Insert(const LeakEntry& e) { entries_.insert(e); }
  bool Contains(const LeakEntry& e) const { return entries_.contains(e); }
  size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::set<LeakEntry>& entries() const { return entries_; }

  int64_t SizeInRound(int64_t round) const;
  int64_t MaxPerRound() const;

 private:
  std::set<LeakEntry> entries_;
};

// Collects (site, block) of every step carrying a released estimate. Pure
// synchronization steps are excluded: the round's thresholds are discarded
// there. The block is that of the item delivered at the step, which is the
// block whose bit triggered the release.
absl::StatusOr<LeakSet> ComputeLeakSet(const Transcript& transcript,
                                       std::span<const ItemLogEntry> item_log);

// Normalized count of bits the sites have sent in the round active at step t
// (t = number of processed steps), evaluated from the thresholds and the
// per-site counts alone: (sum_i d_i + sum_i [active block fired]) / (k k').
absl::StatusOr<double> QueryValue(const ThresholdDb& db,
                                  std::span<const ItemLogEntry> item_log,
                                  size_t t);

enum class AuditAdversary { kRoundRobin, kStopOnFire };
enum class AuditVerdict { kNoViolation, kViolation, kInconclusive };

struct AuditConfig {
  int32_t k = 4;
  int64_t block_size = 3;
  double beta = 0.05;
  double alpha = 0.1;
  int64_t n0 = 1000;
  int64_t items = 72;
  // Differing threshold (site, block) of the neighboring databases.
  int32_t target_site = 2;
  int64_t target_block = 5;
  int64_t threshold_d = 1;
  int64_t threshold_d_prime = 3;
  // D' = D (control run).
  bool identical = false;
  int64_t trials = 100000;
  uint64_t seed = 42;
  uint64_t database_seed = 7;
  NoiseMode noise_mode = NoiseMode::kStandard;
  AuditAdversary adversary = AuditAdversary::kRoundRobin;
  int64_t min_count = 100;
  double level = 0.95;
  int workers = 1;
};

struct AuditReport {
  RoundParams params;
  double epsilon = 0;
  int64_t surviving_d = 0;
  int64_t surviving_d_prime = 0;
  PrivacyProbeReport probe;
  AuditVerdict verdict = AuditVerdict::kInconclusive;
};

// First-round parameters of the audited round: derived constants for k and
// beta with the block size pinned to config.block_size.
absl::StatusOr<RoundParams> AuditRoundParams(const AuditConfig& config);

// The pinned pair (D, D'). D is drawn once from database_seed; D' replaces
// the target threshold (unless config.identical).
absl::StatusOr<std::pair<ThresholdDb, ThresholdDb>> AuditDatabases(
    const AuditConfig& config);

absl::StatusOr<AuditReport> AuditPartialDp(const AuditConfig& config);

// Text table: event signature, count_D, count_D', log-ratio, CI, verdict.
void WriteAuditReport(const AuditReport& report, std::ostream& out);

const char* AuditVerdictName(AuditVerdict verdict);

}  // namespace dptrack

#endif  // DPTRACK_PRIVACY_AUDIT_H_
