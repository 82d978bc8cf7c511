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

#ifndef DPTRACK_ADVERSARIES_H_
#define DPTRACK_ADVERSARIES_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "dptrack/noise.h"
#include "dptrack/tracking_core.h"

namespace dptrack {

// An input generator in the adversarial game. It sees only the transcript
// (its own past actions and the mechanism's announcements) and its own seeded
// stream. Returns nullopt once its item budget is spent.
class Adversary {
 public:
  virtual ~Adversary() = default;
  virtual std::optional<StepAction> NextAction(const TranscriptView& history) = 0;
  virtual std::string name() const = 0;
};

struct ReplaySchedule {
  enum class Kind { kRoundRobin, kSingleSite, kWeighted };
  Kind kind = Kind::kRoundRobin;
  int32_t site = 1;             // kSingleSite
  std::vector<double> weights;  // kWeighted, one per site

  static ReplaySchedule RoundRobin() { return {}; }
  static ReplaySchedule SingleSite(int32_t site) {
    return {Kind::kSingleSite, site, {}};
  }
  static ReplaySchedule Weighted(std::vector<double> weights) {
    return {Kind::kWeighted, 1, std::move(weights)};
  }
};

// Oblivious: the schedule is fixed in advance and announcements are ignored.
absl::StatusOr<std::unique_ptr<Adversary>> MakeReplayAdversary(
    const ReplaySchedule& schedule, int32_t k, int64_t budget, RngStream rng);

// Feeds one site until an Update is announced right after one of its items,
// then moves on to the next site. Against a tracker that announces every bit
// this leaves each fired block under-filled.
absl::StatusOr<std::unique_ptr<Adversary>> MakeStopOnFireAdversary(int32_t k,
                                                                   int64_t budget);

// Sends every item to the site whose delivery most recently coincided with a
// released estimate; round-robin until the first release.
absl::StatusOr<std::unique_ptr<Adversary>> MakeUpdateChaserAdversary(
    int32_t k, int64_t budget);

}  // namespace dptrack

#endif  // DPTRACK_ADVERSARIES_H_
