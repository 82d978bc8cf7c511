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

// Types shared by every tracker: the adversary/mechanism transcript, round
// parameters, and communication accounting.

#ifndef DPTRACK_TRACKING_CORE_H_
#define DPTRACK_TRACKING_CORE_H_

#include <cstdint>
#include <limits>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace dptrack {

struct ItemEvent {
  int32_t site_id = 1;  // 1-based
};

class StepAction {
 public:
  static StepAction Deliver(int32_t site_id) { return StepAction(site_id); }
  static StepAction Skip() { return StepAction(0); }

  bool is_deliver() const { return site_ != 0; }
  // 1-based site of a Deliver action; 0 for Skip.
  int32_t site_id() const { return site_; }
  ItemEvent item() const { return ItemEvent{site_}; }

  friend bool operator==(const StepAction&, const StepAction&) = default;

 private:
  explicit StepAction(int32_t site) : site_(site) {}
  int32_t site_;
};

enum class AnnouncementTag : uint8_t { kNoChange = 0, kUpdate = 1 };

// What an announcement is made of. A NoChange announcement has no flags; an
// Update has at least one.
enum AnnouncementFlag : uint8_t {
  // The mechanism released a new (randomized) estimate at this step.
  kReleaseFlag = 1,
  // The server synchronized and announced the exact count.
  kSyncFlag = 2,
};

struct Announcement {
  AnnouncementTag tag = AnnouncementTag::kNoChange;
  uint8_t flags = 0;
  // The mechanism's answer a_t after processing the step.
  double value = 0;
  // The estimate released at this step when kReleaseFlag is set. Equals
  // `value` unless the same step also triggered a synchronization.
  double released = 0;

  static Announcement NoChange(double value) {
    return {AnnouncementTag::kNoChange, 0, value, 0};
  }
  static Announcement Release(double value) {
    return {AnnouncementTag::kUpdate, kReleaseFlag, value, value};
  }
  static Announcement Sync(double exact) {
    return {AnnouncementTag::kUpdate, kSyncFlag, exact, 0};
  }
  static Announcement ReleaseThenSync(double released, double exact) {
    return {AnnouncementTag::kUpdate, kReleaseFlag | kSyncFlag, exact, released};
  }

  bool is_update() const { return tag == AnnouncementTag::kUpdate; }
  bool is_release() const { return (flags & kReleaseFlag) != 0; }
  bool is_sync() const { return (flags & kSyncFlag) != 0; }
};

struct TranscriptEntry {
  StepAction action = StepAction::Skip();
  Announcement announcement;
  // Total number of delivered items after this step.
  int64_t true_count = 0;
};

class Transcript {
 public:
  void Reserve(size_t n) { entries_.reserve(n); }
  void Append(StepAction action, const Announcement& announcement,
              int64_t true_count) {
    entries_.push_back({action, announcement, true_count});
  }

  size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const TranscriptEntry& operator[](size_t t) const { return entries_[t]; }
  const std::vector<TranscriptEntry>& entries() const { return entries_; }

  // Checks that counts only grow on Deliver, by exactly one, and that
  // NoChange announcements repeat the previous value.
  absl::Status Validate(int64_t initial_count = 0,
                        double initial_value = 0) const;

 private:
  std::vector<TranscriptEntry> entries_;
};

// What an adversary may see: its own actions and the announcements. True
// counts are not exposed (they are derivable from its own actions anyway).
class TranscriptView {
 public:
  explicit TranscriptView(const Transcript& transcript) : t_(&transcript) {}

  size_t size() const { return t_->size(); }
  bool empty() const { return t_->empty(); }
  StepAction action(size_t t) const { return (*t_)[t].action; }
  const Announcement& announcement(size_t t) const {
    return (*t_)[t].announcement;
  }

 private:
  const Transcript* t_;
};

// Per-round constants of the robust protocol. `s` stands in for sqrt(k).
struct RoundParams {
  int64_t n0 = 0;
  int32_t k = 1;
  int32_t s = 1;
  double alpha = 0.1;
  double beta = 0.01;
  double c = 1;
  int64_t delta = 1;
  double eps = 1;
  double threshold = 2;  // T
  int64_t k_prime = 1;
};

// ceil(sqrt(k)) computed exactly in integers.
int32_t CeilSqrt(int64_t k);

// C = sqrt(((log2 s)^1.5 + 1) * log2(8 s / beta)).
double RoundConstantC(int32_t s, double beta);

// Returns FailedPrecondition (see IsBootstrapRequired) when the block size
// alpha*N0 / (8 C s) is below 1.
absl::StatusOr<RoundParams> DeriveRoundParams(int64_t n0, int32_t k,
                                              double alpha, double beta);

bool IsBootstrapRequired(const absl::Status& status);

// Smallest N0 for which DeriveRoundParams succeeds.
int64_t BootstrapThreshold(int32_t k, double alpha, double beta);

// Per-round failure probability for an overall failure budget `delta`:
// delta / (s * ceil(max(1, log2 N_max) / (alpha * s))).
absl::StatusOr<double> DeriveGlobalBeta(double delta, double alpha, int32_t k,
                                        int64_t n_max);

// Mechanism-side record of one step, used to evaluate leak sets and the
// counting query. Not visible to adversaries.
struct ItemLogEntry {
  int32_t site = 0;  // 0 for Skip
  // Items received by `site` in the current round, including this one.
  int64_t site_round_count = 0;
  // Block size of the round (0 outside rounds).
  int64_t delta = 0;
  int64_t round = -1;  // -1 outside rounds (bootstrap)
};

struct CommLedger {
  int64_t site_to_server_words = 0;
  int64_t server_to_site_words = 0;
  int64_t broadcast_words = 0;

  int64_t total() const {
    return site_to_server_words + server_to_site_words + broadcast_words;
  }
};

// Common surface of the robust tracker and the baselines.
class Tracker {
 public:
  virtual ~Tracker() = default;

  virtual absl::StatusOr<Announcement> Step(const StepAction& action) = 0;

  virtual double estimate() const = 0;
  virtual int64_t true_count() const = 0;
  virtual const CommLedger& ledger() const = 0;
  virtual int64_t rounds_completed() const = 0;
};

}  // namespace dptrack

#endif  // DPTRACK_TRACKING_CORE_H_
