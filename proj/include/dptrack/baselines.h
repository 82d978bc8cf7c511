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

// Comparison trackers: the deterministic (1 + alpha)-factor reporter and the
// oblivious randomized block tracker that exposes every bit.

#ifndef DPTRACK_BASELINES_H_
#define DPTRACK_BASELINES_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "absl/status/statusor.h"
#include "dptrack/noise.h"
#include "dptrack/tracking_core.h"

namespace dptrack {

struct DetSiteState {
  int64_t count = 0;
  int64_t last_reported = 0;
};

// Each site reports its exact count when it first reaches 1 and whenever it
// has grown by a factor of at least (1 + alpha) since the last report. The
// server answers the sum of last reports.
class DeterministicTracker final : public Tracker {
 public:
  static absl::StatusOr<std::unique_ptr<DeterministicTracker>> Create(
      int32_t k, double alpha);

  absl::StatusOr<Announcement> Step(const StepAction& action) override;

  // Returns the reported count if `site` reports on this item.
  std::optional<int64_t> SiteReceive(int32_t site_id);

  double estimate() const override { return static_cast<double>(sum_reported_); }
  int64_t true_count() const override { return true_count_; }
  const CommLedger& ledger() const override { return ledger_; }
  int64_t rounds_completed() const override { return 0; }

  const DetSiteState& site(int32_t site_id) const { return sites_[site_id - 1]; }

 private:
  DeterministicTracker(int32_t k, double alpha);

  int32_t k_;
  double alpha_;
  std::vector<DetSiteState> sites_;
  int64_t sum_reported_ = 0;
  int64_t true_count_ = 0;
  CommLedger ledger_;
};

struct OblivSiteState {
  int64_t count = 0;
  int64_t block = 0;
  int64_t offset = 0;
  int64_t threshold = 0;
  bool fired = false;
};

struct ObliviousTrackerOptions {
  int32_t k = 16;
  double alpha = 0.1;
  int64_t c0 = 8;
  uint64_t seed = 0;
};

// Blocks of Delta_obl = max(1, floor(alpha N0 / (c0 s))) items, one bit per
// block at a uniform offset, no cap on blocks. The server announces
// m * Delta_obl + N0 on every bit and resynchronizes once that estimate
// reaches 2 N0.
class ObliviousTracker final : public Tracker {
 public:
  static absl::StatusOr<std::unique_ptr<ObliviousTracker>> Create(
      const ObliviousTrackerOptions& options);

  absl::StatusOr<Announcement> Step(const StepAction& action) override;

  double estimate() const override { return estimate_; }
  int64_t true_count() const override { return true_count_; }
  const CommLedger& ledger() const override { return ledger_; }
  int64_t rounds_completed() const override { return rounds_; }

  int64_t delta() const { return delta_; }
  int64_t n0() const { return n0_; }
  int64_t bits_this_round() const { return bits_; }
  const OblivSiteState& site(int32_t site_id) const { return sites_[site_id - 1]; }

 private:
  explicit ObliviousTracker(const ObliviousTrackerOptions& options);
  void BeginRound(int64_t n0);
  bool SiteReceive(int32_t site_id);

  ObliviousTrackerOptions options_;
  int32_t s_;
  int64_t n0_ = 0;
  int64_t delta_ = 1;
  int64_t bits_ = 0;
  int64_t rounds_ = 0;
  int64_t true_count_ = 0;
  double estimate_ = 0;
  std::vector<OblivSiteState> sites_;
  std::vector<RngStream> site_rngs_;
  CommLedger ledger_;
};

}  // namespace dptrack

#endif  // DPTRACK_BASELINES_H_
