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

#include "dptrack/harness.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "dptrack/baselines.h"
#include "dptrack/parallel.h"
#include "dptrack/privacy_audit.h"
#include "dptrack/robust_tracker.h"
#include "json.hpp"

namespace dptrack {
namespace {

constexpr int64_t kCheckpoints = 1024;

}  // namespace

absl::Status ValidateConfig(const ExperimentConfig& config) {
  if (config.k < 1) {
    return absl::InvalidArgumentError(absl::StrCat("k must be >= 1, got ", config.k));
  }
  if (!(config.alpha > 0 && config.alpha < 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("alpha must be in (0, 1), got ", config.alpha));
  }
  if (!(config.delta > 0 && config.delta < 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must be in (0, 1), got ", config.delta));
  }
  if (config.items < 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("items must be >= 0, got ", config.items));
  }
  if (config.trials < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("trials must be >= 1, got ", config.trials));
  }
  if (config.c0 < 1) {
    return absl::InvalidArgumentError(absl::StrCat("c0 must be >= 1, got ", config.c0));
  }
  if (config.n_floor && *config.n_floor < 1) {
    return absl::InvalidArgumentError("n_floor must be >= 1");
  }
  if (config.workers < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("workers must be >= 1, got ", config.workers));
  }
  const AdversarySpec& adv = config.adversary;
  if (adv.kind == AdversarySpec::Kind::kReplay) {
    if (adv.schedule.kind == ReplaySchedule::Kind::kSingleSite &&
        (adv.schedule.site < 1 || adv.schedule.site > config.k)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "single_site target ", adv.schedule.site, " outside 1..", config.k));
    }
    if (adv.schedule.kind == ReplaySchedule::Kind::kWeighted &&
        static_cast<int32_t>(adv.schedule.weights.size()) != config.k) {
      return absl::InvalidArgumentError(
          absl::StrCat("weighted schedule needs ", config.k, " weights, got ",
                       adv.schedule.weights.size()));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<double> ConfigBeta(const ExperimentConfig& config) {
  return DeriveGlobalBeta(config.delta, config.alpha, config.k,
                          std::max<int64_t>(config.items, 1));
}

absl::StatusOr<int64_t> ErrorFloor(const ExperimentConfig& config) {
  if (config.n_floor) return *config.n_floor;
  absl::StatusOr<double> beta = ConfigBeta(config);
  if (!beta.ok()) return beta.status();
  return BootstrapThreshold(config.k, config.alpha, *beta);
}

absl::StatusOr<std::unique_ptr<Tracker>> MakeTracker(const ExperimentConfig& config,
                                                     uint64_t trial_seed) {
  switch (config.mechanism) {
    case MechanismKind::kRobust: {
      absl::StatusOr<double> beta = ConfigBeta(config);
      if (!beta.ok()) return beta.status();
      RobustTrackerOptions options;
      options.k = config.k;
      options.alpha = config.alpha;
      options.beta = *beta;
      options.noise_mode = config.noise_mode;
      options.seed = trial_seed;
      absl::StatusOr<std::unique_ptr<RobustTracker>> t = RobustTracker::Create(options);
      if (!t.ok()) return t.status();
      return std::unique_ptr<Tracker>(*std::move(t));
    }
    case MechanismKind::kOblivious: {
      ObliviousTrackerOptions options;
      options.k = config.k;
      options.alpha = config.alpha;
      options.c0 = config.c0;
      options.seed = trial_seed;
      absl::StatusOr<std::unique_ptr<ObliviousTracker>> t =
          ObliviousTracker::Create(options);
      if (!t.ok()) return t.status();
      return std::unique_ptr<Tracker>(*std::move(t));
    }
    case MechanismKind::kDeterministic: {
      absl::StatusOr<std::unique_ptr<DeterministicTracker>> t =
          DeterministicTracker::Create(config.k, config.alpha);
      if (!t.ok()) return t.status();
      return std::unique_ptr<Tracker>(*std::move(t));
    }
  }
  return absl::InvalidArgumentError("unknown mechanism");
}

absl::StatusOr<std::unique_ptr<Adversary>> MakeAdversary(
    const ExperimentConfig& config, uint64_t trial_seed) {
  switch (config.adversary.kind) {
    case AdversarySpec::Kind::kReplay:
      return MakeReplayAdversary(
          config.adversary.schedule, config.k, config.items,
          DeriveStream(trial_seed, {{EntityTag::kAdversary, 0}}));
    case AdversarySpec::Kind::kStopOnFire:
      return MakeStopOnFireAdversary(config.k, config.items);
    case AdversarySpec::Kind::kUpdateChaser:
      return MakeUpdateChaserAdversary(config.k, config.items);
  }
  return absl::InvalidArgumentError("unknown adversary");
}

absl::StatusOr<TrialResult> RunTrial(const ExperimentConfig& config,
                                     int64_t trial) {
  if (absl::Status st = ValidateConfig(config); !st.ok()) return st;
  absl::StatusOr<int64_t> n_floor = ErrorFloor(config);
  if (!n_floor.ok()) return n_floor.status();

  const uint64_t trial_seed =
      DeriveSeed(config.seed, {{EntityTag::kTrial, static_cast<uint64_t>(trial)}});
  absl::StatusOr<std::unique_ptr<Tracker>> tracker = MakeTracker(config, trial_seed);
  if (!tracker.ok()) return tracker.status();
  absl::StatusOr<std::unique_ptr<Adversary>> adversary =
      MakeAdversary(config, trial_seed);
  if (!adversary.ok()) return adversary.status();
  auto* robust = dynamic_cast<RobustTracker*>(tracker->get());

  TrialResult result;
  TrialMetrics& m = result.metrics;
  m.trial = trial;
  m.seed = trial_seed;
  result.transcript.Reserve(config.items);
  if (robust != nullptr) result.item_log.reserve(config.items);

  const TranscriptView view(result.transcript);
  int64_t next_checkpoint = 1;
  auto checkpoint_step = [&](int64_t i) {
    return (i * config.items + kCheckpoints - 1) / kCheckpoints;
  };
  while (std::optional<StepAction> action = (*adversary)->NextAction(view)) {
    absl::StatusOr<Announcement> ann = (*tracker)->Step(*action);
    if (!ann.ok()) {
      return absl::Status(ann.status().code(),
                          absl::StrCat("trial ", trial, " step ",
                                       result.transcript.size() + 1, ": ",
                                       ann.status().message()));
    }
    const int64_t n = (*tracker)->true_count();
    result.transcript.Append(*action, *ann, n);
    if (robust != nullptr) result.item_log.push_back(robust->last_item_log());

    const int64_t t = static_cast<int64_t>(result.transcript.size());
    if (n >= *n_floor && n > 0) {
      const double err = std::abs(ann->value - static_cast<double>(n)) /
                         static_cast<double>(n);
      m.max_rel_error = std::max(m.max_rel_error, err);
    }
    bool sample = ann->is_update();
    while (next_checkpoint <= kCheckpoints && checkpoint_step(next_checkpoint) <= t) {
      sample = true;
      ++next_checkpoint;
    }
    if (sample) m.error_samples.push_back({t, n, ann->value});
  }

  if (absl::Status st = result.transcript.Validate(); !st.ok()) {
    return absl::InternalError(
        absl::StrCat("trial ", trial, " transcript invalid: ", st.message()));
  }
  m.n_items = (*tracker)->true_count();
  m.failed = m.max_rel_error > config.alpha;
  m.ledger = (*tracker)->ledger();
  m.rounds = (*tracker)->rounds_completed();

  if (robust != nullptr) {
    absl::StatusOr<LeakSet> leaks = ComputeLeakSet(result.transcript, result.item_log);
    if (!leaks.ok()) return leaks.status();
    m.max_leaks_per_round = leaks->MaxPerRound();
    for (const RoundSummary& r : robust->completed_rounds()) {
      RoundMetrics rm;
      rm.n0 = r.n0;
      rm.delta = r.delta;
      rm.bits = r.bits;
      rm.phase_bits = r.phase_bits;
      rm.releases = r.releases;
      rm.leaks = leaks->SizeInRound(r.round_index);
      rm.ended_by_signal = r.ended_by_signal;
      m.round_metrics.push_back(std::move(rm));
    }
  }
  return result;
}

absl::StatusOr<AggregateReport> RunTrials(const ExperimentConfig& config) {
  if (absl::Status st = ValidateConfig(config); !st.ok()) return st;
  absl::StatusOr<int64_t> n_floor = ErrorFloor(config);
  if (!n_floor.ok()) return n_floor.status();

  std::vector<absl::StatusOr<TrialMetrics>> results(config.trials);
  ParallelFor(config.trials, config.workers, [&](int64_t i) {
    absl::StatusOr<TrialResult> r = RunTrial(config, i);
    if (r.ok()) {
      results[i] = std::move(r->metrics);
    } else {
      results[i] = r.status();
    }
  });

  AggregateReport report;
  report.config = config;
  report.n_floor = *n_floor;
  report.trials.reserve(config.trials);
  double words = 0;
  double err = 0;
  for (absl::StatusOr<TrialMetrics>& r : results) {
    if (!r.ok()) return r.status();
    report.failures += r->failed ? 1 : 0;
    words += static_cast<double>(r->ledger.total());
    err += r->max_rel_error;
    report.max_total_words = std::max(report.max_total_words, r->ledger.total());
    report.trials.push_back(*std::move(r));
  }
  const double n = static_cast<double>(config.trials);
  report.failure_fraction = static_cast<double>(report.failures) / n;
  report.failure_ci = WilsonInterval(report.failures, config.trials, 1.959963984540054);
  report.mean_total_words = words / n;
  report.mean_max_rel_error = err / n;
  return report;
}

std::string MechanismName(MechanismKind kind) {
  switch (kind) {
    case MechanismKind::kRobust:
      return "robust";
    case MechanismKind::kOblivious:
      return "oblivious";
    case MechanismKind::kDeterministic:
      return "deterministic";
  }
  return "unknown";
}

std::string AdversaryName(const AdversarySpec& spec) {
  switch (spec.kind) {
    case AdversarySpec::Kind::kReplay:
      switch (spec.schedule.kind) {
        case ReplaySchedule::Kind::kRoundRobin:
          return "replay:round_robin";
        case ReplaySchedule::Kind::kSingleSite:
          return absl::StrCat("replay:single_site:", spec.schedule.site);
        case ReplaySchedule::Kind::kWeighted:
          return absl::StrCat(
              "replay:weighted:",
              absl::StrJoin(spec.schedule.weights, ",", [](std::string* out, double w) {
                absl::StrAppend(out, absl::StrFormat("%g", w));
              }));
      }
      break;
    case AdversarySpec::Kind::kStopOnFire:
      return "stop_on_fire";
    case AdversarySpec::Kind::kUpdateChaser:
      return "update_chaser";
  }
  return "unknown";
}

void WriteTrialsCsv(const AggregateReport& report, std::ostream& out) {
  const ExperimentConfig& c = report.config;
  // Weighted adversary names contain commas.
  std::string adversary = AdversaryName(c.adversary);
  if (adversary.find(',') != std::string::npos) adversary = "\"" + adversary + "\"";
  out << "trial,seed,mechanism,adversary,k,alpha,delta,n_items,max_rel_error,"
         "failed,total_words,rounds\n";
  for (const TrialMetrics& m : report.trials) {
    out << absl::StrFormat("%d,%d,%s,%s,%d,%.17g,%.17g,%d,%.17g,%d,%d,%d\n",
                           m.trial, m.seed, MechanismName(c.mechanism), adversary,
                           c.k, c.alpha, c.delta, m.n_items, m.max_rel_error,
                           m.failed ? 1 : 0, m.ledger.total(), m.rounds);
  }
}

void WriteSummaryJson(const AggregateReport& report, std::ostream& out) {
  const ExperimentConfig& c = report.config;
  nlohmann::ordered_json j;
  j["mechanism"] = MechanismName(c.mechanism);
  j["adversary"] = AdversaryName(c.adversary);
  j["k"] = c.k;
  j["alpha"] = c.alpha;
  j["delta"] = c.delta;
  j["items"] = c.items;
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  j["noise_mode"] = c.noise_mode == NoiseMode::kStandard ? "standard" : "disabled";
  j["n_floor"] = report.n_floor;
  j["failures"] = report.failures;
  j["failure_fraction"] = report.failure_fraction;
  j["failure_ci"] = {report.failure_ci.lower, report.failure_ci.upper};
  j["mean_total_words"] = report.mean_total_words;
  j["max_total_words"] = report.max_total_words;
  j["mean_max_rel_error"] = report.mean_max_rel_error;

  int64_t s2s = 0;
  int64_t s2site = 0;
  int64_t bcast = 0;
  for (const TrialMetrics& m : report.trials) {
    s2s += m.ledger.site_to_server_words;
    s2site += m.ledger.server_to_site_words;
    bcast += m.ledger.broadcast_words;
  }
  const double n = static_cast<double>(report.trials.size());
  j["mean_words_by_category"] = {
      {"site_to_server", static_cast<double>(s2s) / n},
      {"server_to_site", static_cast<double>(s2site) / n},
      {"broadcast", static_cast<double>(bcast) / n}};
  out << j.dump(2) << "\n";
}

absl::StatusOr<std::vector<SweepRow>> RunSweep(
    const ExperimentConfig& base, const std::vector<int32_t>& ks,
    const std::vector<double>& alphas,
    const std::vector<MechanismKind>& mechanisms) {
  if (ks.empty() || alphas.empty() || mechanisms.empty()) {
    return absl::InvalidArgumentError("sweep lists must be nonempty");
  }
  std::vector<SweepRow> rows;
  for (int32_t k : ks) {
    for (double alpha : alphas) {
      for (MechanismKind mechanism : mechanisms) {
        ExperimentConfig config = base;
        config.k = k;
        config.alpha = alpha;
        config.mechanism = mechanism;
        absl::StatusOr<AggregateReport> report = RunTrials(config);
        if (!report.ok()) return report.status();
        rows.push_back({k, alpha, mechanism, report->mean_total_words,
                        report->failure_fraction});
      }
    }
  }
  return rows;
}

void WriteSweepCsv(const std::vector<SweepRow>& rows, std::ostream& out) {
  out << "k,alpha,mechanism,mean_total_words,failure_fraction\n";
  for (const SweepRow& r : rows) {
    out << absl::StrFormat("%d,%.17g,%s,%.17g,%.17g\n", r.k, r.alpha,
                           MechanismName(r.mechanism), r.mean_total_words,
                           r.failure_fraction);
  }
}

}  // namespace dptrack
