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

#include "dptrack/adversaries.h"

#include <numeric>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace dptrack {
namespace {

class BudgetedAdversary : public Adversary {
 public:
  BudgetedAdversary(int32_t k, int64_t budget) : k_(k), budget_(budget) {}

  std::optional<StepAction> NextAction(const TranscriptView& history) final {
    if (delivered_ >= budget_) return std::nullopt;
    ++delivered_;
    return StepAction::Deliver(ChooseSite(history));
  }

 protected:
  virtual int32_t ChooseSite(const TranscriptView& history) = 0;

  // True when the latest step was a delivery that produced an Update.
  static bool LastStepUpdated(const TranscriptView& history) {
    return !history.empty() &&
           history.announcement(history.size() - 1).is_update() &&
           history.action(history.size() - 1).is_deliver();
  }

  int32_t k_;

 private:
  int64_t budget_;
  int64_t delivered_ = 0;
};

class ReplayAdversary final : public BudgetedAdversary {
 public:
  ReplayAdversary(const ReplaySchedule& schedule, int32_t k, int64_t budget,
                  RngStream rng)
      : BudgetedAdversary(k, budget), schedule_(schedule), rng_(rng) {
    if (schedule_.kind == ReplaySchedule::Kind::kWeighted) {
      cumulative_.resize(schedule_.weights.size());
      std::partial_sum(schedule_.weights.begin(), schedule_.weights.end(),
                       cumulative_.begin());
    }
  }

  std::string name() const override {
    switch (schedule_.kind) {
      case ReplaySchedule::Kind::kRoundRobin:
        return "replay:round_robin";
      case ReplaySchedule::Kind::kSingleSite:
        return absl::StrCat("replay:single_site:", schedule_.site);
      case ReplaySchedule::Kind::kWeighted:
        return "replay:weighted";
    }
    return "replay";
  }

 protected:
  int32_t ChooseSite(const TranscriptView&) override {
    switch (schedule_.kind) {
      case ReplaySchedule::Kind::kRoundRobin: {
        const int32_t site = next_ + 1;
        next_ = (next_ + 1) % k_;
        return site;
      }
      case ReplaySchedule::Kind::kSingleSite:
        return schedule_.site;
      case ReplaySchedule::Kind::kWeighted: {
        const double u = rng_.NextUniform() * cumulative_.back();
        for (size_t i = 0; i < cumulative_.size(); ++i) {
          if (u < cumulative_[i]) return static_cast<int32_t>(i) + 1;
        }
        return static_cast<int32_t>(cumulative_.size());
      }
    }
    return 1;
  }

 private:
  ReplaySchedule schedule_;
  RngStream rng_;
  std::vector<double> cumulative_;
  int32_t next_ = 0;
};

class StopOnFireAdversary final : public BudgetedAdversary {
 public:
  using BudgetedAdversary::BudgetedAdversary;
  std::string name() const override { return "stop_on_fire"; }

 protected:
  int32_t ChooseSite(const TranscriptView& history) override {
    if (LastStepUpdated(history) &&
        history.action(history.size() - 1).site_id() == current_ + 1) {
      current_ = (current_ + 1) % k_;
    }
    return current_ + 1;
  }

 private:
  int32_t current_ = 0;
};

class UpdateChaserAdversary final : public BudgetedAdversary {
 public:
  using BudgetedAdversary::BudgetedAdversary;
  std::string name() const override { return "update_chaser"; }

 protected:
  int32_t ChooseSite(const TranscriptView& history) override {
    if (!history.empty()) {
      const size_t last = history.size() - 1;
      if (history.announcement(last).is_release() &&
          history.action(last).is_deliver()) {
        target_ = history.action(last).site_id();
      }
    }
    if (target_ != 0) return target_;
    const int32_t site = next_ + 1;
    next_ = (next_ + 1) % k_;
    return site;
  }

 private:
  int32_t target_ = 0;
  int32_t next_ = 0;
};

absl::Status CheckCommon(int32_t k, int64_t budget) {
  if (k < 1) return absl::InvalidArgumentError(absl::StrCat("k must be >= 1, got ", k));
  if (budget < 0) {
    return absl::InvalidArgumentError(absl::StrCat("negative budget ", budget));
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<std::unique_ptr<Adversary>> MakeReplayAdversary(
    const ReplaySchedule& schedule, int32_t k, int64_t budget, RngStream rng) {
  if (absl::Status st = CheckCommon(k, budget); !st.ok()) return st;
  switch (schedule.kind) {
    case ReplaySchedule::Kind::kRoundRobin:
      break;
    case ReplaySchedule::Kind::kSingleSite:
      if (schedule.site < 1 || schedule.site > k) {
        return absl::InvalidArgumentError(
            absl::StrCat("single_site target ", schedule.site, " outside 1..", k));
      }
      break;
    case ReplaySchedule::Kind::kWeighted: {
      if (static_cast<int32_t>(schedule.weights.size()) != k) {
        return absl::InvalidArgumentError(absl::StrCat(
            "weighted schedule needs ", k, " weights, got ", schedule.weights.size()));
      }
      double total = 0;
      for (double w : schedule.weights) {
        if (!(w >= 0)) return absl::InvalidArgumentError("negative weight");
        total += w;
      }
      if (!(total > 0)) return absl::InvalidArgumentError("weights sum to zero");
      break;
    }
  }
  return std::make_unique<ReplayAdversary>(schedule, k, budget, rng);
}

absl::StatusOr<std::unique_ptr<Adversary>> MakeStopOnFireAdversary(int32_t k,
                                                                   int64_t budget) {
  if (absl::Status st = CheckCommon(k, budget); !st.ok()) return st;
  return std::make_unique<StopOnFireAdversary>(k, budget);
}

absl::StatusOr<std::unique_ptr<Adversary>> MakeUpdateChaserAdversary(
    int32_t k, int64_t budget) {
  if (absl::Status st = CheckCommon(k, budget); !st.ok()) return st;
  return std::make_unique<UpdateChaserAdversary>(k, budget);
}

}  // namespace dptrack
