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

#include "dptrack/robust_tracker.h"

#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace dptrack {

// ---------------------------------------------------------------------------
// SiteState

SiteState::SiteState(int32_t site_id, const RoundParams& params,
                     std::vector<int64_t> thresholds)
    : site_id_(site_id),
      delta_(params.delta),
      k_prime_(params.k_prime),
      thresholds_(std::move(thresholds)),
      fired_(thresholds_.size(), 0) {}

SiteState SiteState::BeginRound(int32_t site_id, const RoundParams& params,
                                RngStream& rng) {
  std::vector<int64_t> thresholds(params.k_prime);
  for (int64_t& r : thresholds) {
    // delta >= 1 is a RoundParams invariant.
    r = *SampleUniformThreshold(rng, params.delta);
  }
  return SiteState(site_id, params, std::move(thresholds));
}

absl::StatusOr<SiteState> SiteState::WithThresholds(
    int32_t site_id, const RoundParams& params, std::vector<int64_t> thresholds) {
  if (static_cast<int64_t>(thresholds.size()) != params.k_prime) {
    return absl::InvalidArgumentError(
        absl::StrCat("site ", site_id, " needs ", params.k_prime,
                     " thresholds, got ", thresholds.size()));
  }
  for (int64_t r : thresholds) {
    if (r < 1 || r > params.delta) {
      return absl::InvalidArgumentError(absl::StrCat(
          "threshold ", r, " outside {1..", params.delta, "} at site ", site_id));
    }
  }
  return SiteState(site_id, params, std::move(thresholds));
}

std::optional<SiteMsg> SiteState::ReceiveItem() {
  ++count_;
  if (offset_ == delta_ || block_ == 0) {
    ++block_;
    offset_ = 0;
  }
  ++offset_;
  if (block_ > k_prime_) return SiteMsg::kEndRoundSignal;
  const size_t j = static_cast<size_t>(block_ - 1);
  if (offset_ == thresholds_[j] && fired_[j] == 0) {
    fired_[j] = 1;
    ++bits_;
    return SiteMsg::kBit;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// ServerState

ServerState::ServerState(const RoundParams& params, NoiseMode mode,
                         RngStream threshold_rng, RngStream bm_rng,
                         BinaryMechanism bm)
    : params_(params),
      mode_(mode),
      threshold_rng_(threshold_rng),
      bm_rng_(bm_rng),
      bm_(std::move(bm)),
      last_estimate_(static_cast<double>(params.n0)) {}

absl::StatusOr<ServerState> ServerState::BeginRound(const RoundParams& params,
                                                    NoiseMode mode,
                                                    RngStream threshold_rng,
                                                    RngStream bm_rng) {
  absl::StatusOr<BinaryMechanism> bm =
      BinaryMechanism::Create(params.s, params.eps / 4.0, mode);
  if (!bm.ok()) return bm.status();
  ServerState server(params, mode, threshold_rng, bm_rng, *std::move(bm));
  if (absl::Status st = server.RefreshThreshold(); !st.ok()) return st;
  return server;
}

absl::Status ServerState::RefreshThreshold() {
  absl::StatusOr<double> noise =
      SampleLaplace(threshold_rng_, 4.0 / params_.eps, mode_);
  if (!noise.ok()) return noise.status();
  noisy_threshold_ = params_.threshold + *noise;
  return absl::OkStatus();
}

absl::StatusOr<Announcement> ServerState::OnBit() {
  if (complete_) {
    return absl::FailedPreconditionError("bit received after round end");
  }
  ++phase_bits_;
  if (static_cast<double>(phase_bits_) < noisy_threshold_) {
    return Announcement::NoChange(last_estimate_);
  }
  absl::StatusOr<double> released =
      bm_.Feed(static_cast<double>(phase_bits_), bm_rng_);
  if (!released.ok()) return released.status();
  last_estimate_ = *released * static_cast<double>(params_.delta) +
                   static_cast<double>(params_.n0);
  completed_phase_bits_.push_back(phase_bits_);
  if (phase_ == params_.s) {
    complete_ = true;
  } else {
    ++phase_;
    phase_bits_ = 0;
    if (absl::Status st = RefreshThreshold(); !st.ok()) return st;
  }
  return Announcement::Release(last_estimate_);
}

// ---------------------------------------------------------------------------
// RobustTracker

RobustTracker::RobustTracker(const RobustTrackerOptions& options)
    : options_(options) {}

absl::StatusOr<std::unique_ptr<RobustTracker>> RobustTracker::Create(
    const RobustTrackerOptions& options) {
  if (options.k < 1 || !(options.alpha > 0 && options.alpha < 1) ||
      !(options.beta > 0 && options.beta < 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("robust tracker options out of range: k=", options.k,
                     " alpha=", options.alpha, " beta=", options.beta));
  }
  if (options.first_round_thresholds && !options.first_round) {
    return absl::InvalidArgumentError(
        "pinned thresholds require explicit first-round parameters");
  }
  std::unique_ptr<RobustTracker> tracker(new RobustTracker(options));
  tracker->bootstrap_threshold_ =
      BootstrapThreshold(options.k, options.alpha, options.beta);
  if (options.first_round) {
    const RoundParams& p = *options.first_round;
    if (p.k != options.k || p.delta < 1 || p.k_prime < 1 || p.s < 1) {
      return absl::InvalidArgumentError("invalid first-round parameters");
    }
    tracker->true_count_ = p.n0;
    absl::Status st = tracker->BeginRound(
        p, options.first_round_thresholds ? &*options.first_round_thresholds
                                          : nullptr);
    if (!st.ok()) return st;
  }
  return tracker;
}

absl::Status RobustTracker::BeginRound(const RoundParams& params,
                                       const ThresholdDb* pinned) {
  if (pinned != nullptr && static_cast<int32_t>(pinned->size()) != params.k) {
    return absl::InvalidArgumentError(
        absl::StrCat("pinned database has ", pinned->size(), " sites, want ",
                     params.k));
  }
  const uint64_t r = static_cast<uint64_t>(round_index_);
  params_ = params;
  sites_.clear();
  sites_.reserve(params.k);
  for (int32_t i = 1; i <= params.k; ++i) {
    if (pinned != nullptr) {
      absl::StatusOr<SiteState> site =
          SiteState::WithThresholds(i, params, (*pinned)[i - 1]);
      if (!site.ok()) return site.status();
      sites_.push_back(*std::move(site));
    } else {
      RngStream rng = DeriveStream(
          options_.seed, {{EntityTag::kRound, r},
                          {EntityTag::kSite, static_cast<uint64_t>(i)}});
      sites_.push_back(SiteState::BeginRound(i, params, rng));
    }
  }
  absl::StatusOr<ServerState> server = ServerState::BeginRound(
      params, options_.noise_mode,
      DeriveStream(options_.seed, {{EntityTag::kRound, r}, {EntityTag::kServer, 0}}),
      DeriveStream(options_.seed,
                   {{EntityTag::kRound, r}, {EntityTag::kBinaryMechanism, 0}}));
  if (!server.ok()) return server.status();
  server_.emplace(*std::move(server));
  round_items_ = 0;
  round_bits_ = 0;
  round_releases_ = 0;
  estimate_ = static_cast<double>(params.n0);
  mode_ = TrackerMode::kNormal;
  return absl::OkStatus();
}

absl::Status RobustTracker::EndRound(bool by_signal) {
  const int64_t k = params_.k;
  int64_t total = params_.n0;
  for (const SiteState& site : sites_) total += site.count();
  // Notify every site, collect every counter, broadcast the total.
  ledger_.server_to_site_words += k;
  ledger_.site_to_server_words += k;
  ledger_.broadcast_words += k;

  RoundSummary summary;
  summary.round_index = round_index_;
  summary.n0 = params_.n0;
  summary.delta = params_.delta;
  summary.items = round_items_;
  summary.bits = round_bits_;
  summary.phase_bits = server_->completed_phase_bits();
  summary.releases = round_releases_;
  summary.ended_by_signal = by_signal;
  completed_rounds_.push_back(std::move(summary));

  ++round_index_;
  estimate_ = static_cast<double>(total);
  absl::StatusOr<RoundParams> next =
      DeriveRoundParams(total, options_.k, options_.alpha, options_.beta);
  if (next.ok()) return BeginRound(*next, nullptr);
  if (!IsBootstrapRequired(next.status())) return next.status();
  mode_ = TrackerMode::kBootstrap;
  sites_.clear();
  server_.reset();
  return absl::OkStatus();
}

absl::StatusOr<Announcement> RobustTracker::Step(const StepAction& action) {
  if (!action.is_deliver()) {
    if (mode_ == TrackerMode::kNormal) {
      last_log_ = ItemLogEntry{0, 0, params_.delta, round_index_};
    } else {
      last_log_ = ItemLogEntry{};
    }
    return Announcement::NoChange(estimate_);
  }
  const int32_t site_id = action.site_id();
  if (site_id < 1 || site_id > options_.k) {
    return absl::InvalidArgumentError(
        absl::StrCat("site ", site_id, " outside 1..", options_.k));
  }
  ++true_count_;

  if (mode_ == TrackerMode::kBootstrap) {
    // Exact forwarding: one word per item.
    ++ledger_.site_to_server_words;
    last_log_ = ItemLogEntry{site_id, 0, 0, -1};
    estimate_ = static_cast<double>(true_count_);
    if (true_count_ >= bootstrap_threshold_) {
      absl::StatusOr<RoundParams> params = DeriveRoundParams(
          true_count_, options_.k, options_.alpha, options_.beta);
      if (params.ok()) {
        ledger_.broadcast_words += options_.k;
        if (absl::Status st = BeginRound(*params, nullptr); !st.ok()) return st;
      } else if (!IsBootstrapRequired(params.status())) {
        return params.status();
      }
    }
    return Announcement::Sync(static_cast<double>(true_count_));
  }

  SiteState& site = sites_[site_id - 1];
  const std::optional<SiteMsg> msg = site.ReceiveItem();
  ++round_items_;
  last_log_ = ItemLogEntry{site_id, site.count(), params_.delta, round_index_};
  if (!msg) return Announcement::NoChange(estimate_);

  ++ledger_.site_to_server_words;
  if (*msg == SiteMsg::kEndRoundSignal) {
    if (absl::Status st = EndRound(/*by_signal=*/true); !st.ok()) return st;
    return Announcement::Sync(estimate_);
  }

  ++round_bits_;
  absl::StatusOr<Announcement> ann = server_->OnBit();
  if (!ann.ok()) return ann.status();
  if (!ann->is_release()) return *ann;
  ++round_releases_;
  estimate_ = ann->value;
  if (!server_->round_complete()) return *ann;
  const double released = ann->released;
  if (absl::Status st = EndRound(/*by_signal=*/false); !st.ok()) return st;
  return Announcement::ReleaseThenSync(released, estimate_);
}

}  // namespace dptrack
