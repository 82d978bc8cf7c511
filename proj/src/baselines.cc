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

#include "dptrack/baselines.h"

#include <algorithm>
#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace dptrack {

DeterministicTracker::DeterministicTracker(int32_t k, double alpha)
    : k_(k), alpha_(alpha), sites_(k) {}

absl::StatusOr<std::unique_ptr<DeterministicTracker>> DeterministicTracker::Create(
    int32_t k, double alpha) {
  if (k < 1 || !(alpha > 0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("deterministic tracker needs k >= 1 and alpha > 0, got k=",
                     k, " alpha=", alpha));
  }
  return std::unique_ptr<DeterministicTracker>(new DeterministicTracker(k, alpha));
}

std::optional<int64_t> DeterministicTracker::SiteReceive(int32_t site_id) {
  DetSiteState& site = sites_[site_id - 1];
  ++site.count;
  // Relative tolerance keeps e.g. 1.1 * 10 >= 11 from failing on rounding.
  const double target = (1.0 + alpha_) * static_cast<double>(site.last_reported);
  if (site.count == 1 ||
      static_cast<double>(site.count) >= target * (1.0 - 1e-12)) {
    sum_reported_ += site.count - site.last_reported;
    site.last_reported = site.count;
    ++ledger_.site_to_server_words;
    return site.count;
  }
  return std::nullopt;
}

absl::StatusOr<Announcement> DeterministicTracker::Step(const StepAction& action) {
  if (!action.is_deliver()) return Announcement::NoChange(estimate());
  if (action.site_id() < 1 || action.site_id() > k_) {
    return absl::InvalidArgumentError(
        absl::StrCat("site ", action.site_id(), " outside 1..", k_));
  }
  ++true_count_;
  if (SiteReceive(action.site_id())) return Announcement::Release(estimate());
  return Announcement::NoChange(estimate());
}

// ---------------------------------------------------------------------------

ObliviousTracker::ObliviousTracker(const ObliviousTrackerOptions& options)
    : options_(options), s_(CeilSqrt(options.k)), sites_(options.k) {
  site_rngs_.reserve(options.k);
  for (int32_t i = 1; i <= options.k; ++i) {
    site_rngs_.push_back(DeriveStream(
        options.seed, {{EntityTag::kSite, static_cast<uint64_t>(i)}}));
  }
}

absl::StatusOr<std::unique_ptr<ObliviousTracker>> ObliviousTracker::Create(
    const ObliviousTrackerOptions& options) {
  if (options.k < 1 || !(options.alpha > 0 && options.alpha < 1) ||
      options.c0 < 1) {
    return absl::InvalidArgumentError(absl::StrCat(
        "oblivious tracker options out of range: k=", options.k,
        " alpha=", options.alpha, " c0=", options.c0));
  }
  std::unique_ptr<ObliviousTracker> tracker(new ObliviousTracker(options));
  tracker->BeginRound(0);
  return tracker;
}

void ObliviousTracker::BeginRound(int64_t n0) {
  n0_ = n0;
  delta_ = std::max<int64_t>(
      1, static_cast<int64_t>(std::floor(options_.alpha * static_cast<double>(n0) /
                                         static_cast<double>(options_.c0 * s_))));
  bits_ = 0;
  estimate_ = static_cast<double>(n0);
  for (OblivSiteState& site : sites_) site = OblivSiteState{};
}

bool ObliviousTracker::SiteReceive(int32_t site_id) {
  OblivSiteState& site = sites_[site_id - 1];
  ++site.count;
  if (site.block == 0 || site.offset == delta_) {
    ++site.block;
    site.offset = 0;
    site.fired = false;
    site.threshold = *SampleUniformThreshold(site_rngs_[site_id - 1], delta_);
  }
  ++site.offset;
  if (!site.fired && site.offset == site.threshold) {
    site.fired = true;
    return true;
  }
  return false;
}

absl::StatusOr<Announcement> ObliviousTracker::Step(const StepAction& action) {
  if (!action.is_deliver()) return Announcement::NoChange(estimate_);
  if (action.site_id() < 1 || action.site_id() > options_.k) {
    return absl::InvalidArgumentError(
        absl::StrCat("site ", action.site_id(), " outside 1..", options_.k));
  }
  ++true_count_;
  if (!SiteReceive(action.site_id())) return Announcement::NoChange(estimate_);

  ++ledger_.site_to_server_words;
  ++bits_;
  estimate_ = static_cast<double>(bits_ * delta_ + n0_);
  if (estimate_ < 2.0 * static_cast<double>(n0_)) {
    return Announcement::Release(estimate_);
  }
  const double released = estimate_;
  int64_t total = n0_;
  for (const OblivSiteState& site : sites_) total += site.count;
  ledger_.server_to_site_words += options_.k;
  ledger_.site_to_server_words += options_.k;
  ledger_.broadcast_words += options_.k;
  ++rounds_;
  BeginRound(total);
  return Announcement::ReleaseThenSync(released, estimate_);
}

}  // namespace dptrack
