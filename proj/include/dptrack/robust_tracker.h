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

// The robust count tracker. Each round starts from an exact count N0. Sites
// split their local streams into blocks of Delta items and send one bit per
// block, at a uniformly random offset. The server releases an estimate only
// when the number of bits in the current phase crosses a Laplace-noised
// threshold, and the released value comes from a binary mechanism over the
// per-phase bit counts. After s = ceil(sqrt(k)) phases (or when some site
// exhausts its k' blocks) the round ends with an exact synchronization.

#ifndef DPTRACK_ROBUST_TRACKER_H_
#define DPTRACK_ROBUST_TRACKER_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "dptrack/binary_mechanism.h"
#include "dptrack/noise.h"
#include "dptrack/tracking_core.h"

namespace dptrack {

enum class SiteMsg { kBit, kEndRoundSignal };

// Block thresholds of all sites, indexed [site - 1][block - 1].
using ThresholdDb = std::vector<std::vector<int64_t>>;

class SiteState {
 public:
  // Fresh round: k' thresholds drawn uniformly from {1, ..., Delta}.
  static SiteState BeginRound(int32_t site_id, const RoundParams& params,
                              RngStream& rng);
  // Round with pinned thresholds (exactly k' values in {1, ..., Delta}).
  static absl::StatusOr<SiteState> WithThresholds(int32_t site_id,
                                                  const RoundParams& params,
                                                  std::vector<int64_t> thresholds);

  // Fires a Bit when the within-block offset of this item equals the block's
  // threshold, or EndRoundSignal when the item would open block k' + 1.
  std::optional<SiteMsg> ReceiveItem();

  int32_t site_id() const { return site_id_; }
  int64_t count() const { return count_; }
  int64_t delta() const { return delta_; }
  // 1-based block of the most recent item (0 before any item).
  int64_t block() const { return block_; }
  int64_t offset() const { return offset_; }
  int64_t bits_sent() const { return bits_; }
  std::span<const int64_t> thresholds() const { return thresholds_; }
  bool fired(int64_t block) const { return fired_[block - 1] != 0; }

 private:
  SiteState(int32_t site_id, const RoundParams& params,
            std::vector<int64_t> thresholds);

  int32_t site_id_;
  int64_t delta_;
  int64_t k_prime_;
  int64_t count_ = 0;
  int64_t block_ = 0;
  int64_t offset_ = 0;
  int64_t bits_ = 0;
  std::vector<int64_t> thresholds_;
  std::vector<uint8_t> fired_;
};

class ServerState {
 public:
  static absl::StatusOr<ServerState> BeginRound(const RoundParams& params,
                                                NoiseMode mode,
                                                RngStream threshold_rng,
                                                RngStream bm_rng);

  // One bit arrived. Releases a_j = b_j * Delta + N0 when the phase count
  // reaches the noisy threshold; after phase s the round is complete.
  absl::StatusOr<Announcement> OnBit();

  bool round_complete() const { return complete_; }
  const RoundParams& params() const { return params_; }
  int32_t phase() const { return phase_; }
  int64_t phase_bits() const { return phase_bits_; }
  double noisy_threshold() const { return noisy_threshold_; }
  double last_estimate() const { return last_estimate_; }
  // Bit counts of the phases completed so far this round.
  const std::vector<int64_t>& completed_phase_bits() const {
    return completed_phase_bits_;
  }
  const BinaryMechanism& binary_mechanism() const { return bm_; }

 private:
  ServerState(const RoundParams& params, NoiseMode mode, RngStream threshold_rng,
              RngStream bm_rng, BinaryMechanism bm);
  absl::Status RefreshThreshold();

  RoundParams params_;
  NoiseMode mode_;
  RngStream threshold_rng_;
  RngStream bm_rng_;
  BinaryMechanism bm_;
  int32_t phase_ = 1;
  int64_t phase_bits_ = 0;
  double noisy_threshold_ = 0;
  double last_estimate_ = 0;
  bool complete_ = false;
  std::vector<int64_t> completed_phase_bits_;
};

enum class TrackerMode { kBootstrap, kNormal };

struct RoundSummary {
  int64_t round_index = 0;
  int64_t n0 = 0;
  int64_t delta = 0;
  int64_t items = 0;
  int64_t bits = 0;
  std::vector<int64_t> phase_bits;
  int64_t releases = 0;
  bool ended_by_signal = false;
};

struct RobustTrackerOptions {
  int32_t k = 16;
  double alpha = 0.1;
  double beta = 0.01;
  NoiseMode noise_mode = NoiseMode::kStandard;
  uint64_t seed = 0;
  // Start directly in a round with these parameters instead of counting
  // exactly from zero. Later rounds are derived normally.
  std::optional<RoundParams> first_round;
  // Pinned thresholds for the first round; requires `first_round`.
  std::optional<ThresholdDb> first_round_thresholds;
};

class RobustTracker final : public Tracker {
 public:
  static absl::StatusOr<std::unique_ptr<RobustTracker>> Create(
      const RobustTrackerOptions& options);

  absl::StatusOr<Announcement> Step(const StepAction& action) override;

  double estimate() const override { return estimate_; }
  int64_t true_count() const override { return true_count_; }
  const CommLedger& ledger() const override { return ledger_; }
  int64_t rounds_completed() const override {
    return static_cast<int64_t>(completed_rounds_.size());
  }

  TrackerMode mode() const { return mode_; }
  int64_t round_index() const { return round_index_; }
  // Parameters of the active round; meaningful only in kNormal mode.
  const RoundParams& params() const { return params_; }
  const SiteState& site(int32_t site_id) const { return sites_[site_id - 1]; }
  const ServerState& server() const { return *server_; }
  // Site-to-server bits received in the active round.
  int64_t bits_this_round() const { return round_bits_; }
  const std::vector<RoundSummary>& completed_rounds() const {
    return completed_rounds_;
  }
  // Mechanism-side record of the most recent step.
  const ItemLogEntry& last_item_log() const { return last_log_; }
  int64_t bootstrap_threshold() const { return bootstrap_threshold_; }
  const RobustTrackerOptions& options() const { return options_; }

 private:
  explicit RobustTracker(const RobustTrackerOptions& options);

  absl::Status BeginRound(const RoundParams& params, const ThresholdDb* pinned);
  absl::Status EndRound(bool by_signal);

  RobustTrackerOptions options_;
  TrackerMode mode_ = TrackerMode::kBootstrap;
  int64_t bootstrap_threshold_ = 0;
  int64_t true_count_ = 0;
  double estimate_ = 0;
  CommLedger ledger_;

  int64_t round_index_ = 0;
  RoundParams params_;
  std::vector<SiteState> sites_;
  std::optional<ServerState> server_;
  int64_t round_items_ = 0;
  int64_t round_bits_ = 0;
  int64_t round_releases_ = 0;
  std::vector<RoundSummary> completed_rounds_;
  ItemLogEntry last_log_;
};

}  // namespace dptrack

#endif  // DPTRACK_ROBUST_TRACKER_H_
