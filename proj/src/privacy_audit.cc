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

#include "dptrack/privacy_audit.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "dptrack/adversaries.h"
#include "dptrack/parallel.h"

namespace dptrack {

int64_t LeakSet::SizeInRound(int64_t round) const {
  int64_t n = 0;
  for (const LeakEntry& e : entries_) n += e.round == round ? 1 : 0;
  return n;
}

int64_t LeakSet::MaxPerRound() const {
  std::map<int64_t, int64_t> per_round;
  for (const LeakEntry& e : entries_) ++per_round[e.round];
  int64_t best = 0;
  for (const auto& [round, n] : per_round) best = std::max(best, n);
  return best;
}

absl::StatusOr<LeakSet> ComputeLeakSet(const Transcript& transcript,
                                       std::span<const ItemLogEntry> item_log) {
  if (transcript.size() != item_log.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("transcript has ", transcript.size(), " steps, item log ",
                     item_log.size()));
  }
  LeakSet leaks;
  for (size_t t = 0; t < transcript.size(); ++t) {
    const TranscriptEntry& e = transcript[t];
    const ItemLogEntry& log = item_log[t];
    if (e.action.site_id() != log.site) {
      return absl::InvalidArgumentError(
          absl::StrCat("item log site ", log.site, " != action site ",
                       e.action.site_id(), " at step ", t + 1));
    }
    if (!e.announcement.is_release()) continue;
    if (log.site == 0 || log.round < 0 || log.delta < 1 ||
        log.site_round_count < 1) {
      return absl::InvalidArgumentError(
          absl::StrCat("release at step ", t + 1, " has no in-round item"));
    }
    leaks.Insert({log.round, log.site, (log.site_round_count - 1) / log.delta + 1});
  }
  return leaks;
}

absl::StatusOr<double> QueryValue(const ThresholdDb& db,
                                  std::span<const ItemLogEntry> item_log,
                                  size_t t) {
  if (t > item_log.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("step ", t, " beyond item log of ", item_log.size()));
  }
  if (db.empty() || db.front().empty()) {
    return absl::InvalidArgumentError("empty threshold database");
  }
  const size_t k = db.size();
  const size_t k_prime = db.front().size();
  if (t == 0 || item_log[t - 1].round < 0) return 0.0;

  const int64_t round = item_log[t - 1].round;
  const int64_t delta = item_log[t - 1].delta;
  std::vector<int64_t> counts(k, -1);
  size_t unresolved = k;
  for (size_t u = t; u-- > 0 && unresolved > 0;) {
    const ItemLogEntry& log = item_log[u];
    if (log.round != round) break;
    if (log.site == 0) continue;
    if (static_cast<size_t>(log.site) > k) {
      return absl::InvalidArgumentError(
          absl::StrCat("item log site ", log.site, " outside database"));
    }
    int64_t& c = counts[log.site - 1];
    if (c < 0) {
      c = log.site_round_count;
      --unresolved;
    }
  }

  int64_t bits = 0;
  for (size_t i = 0; i < k; ++i) {
    const int64_t c = std::max<int64_t>(counts[i], 0);
    const int64_t full = c / delta;
    const int64_t offset = c % delta;
    bits += std::min<int64_t>(full, k_prime);
    if (full < static_cast<int64_t>(k_prime) && offset >= db[i][full]) ++bits;
  }
  return static_cast<double>(bits) / static_cast<double>(k * k_prime);
}

absl::StatusOr<RoundParams> AuditRoundParams(const AuditConfig& config) {
  if (config.k < 1 || config.block_size < 1 || config.n0 < 0 ||
      !(config.beta > 0 && config.beta < 1)) {
    return absl::InvalidArgumentError("audit configuration out of range");
  }
  RoundParams p;
  p.n0 = config.n0;
  p.k = config.k;
  p.s = CeilSqrt(config.k);
  p.alpha = config.alpha;
  p.beta = config.beta;
  p.c = RoundConstantC(p.s, config.beta);
  p.delta = config.block_size;
  p.eps = p.c / p.s;
  p.threshold = 2.0 * p.c * p.s;
  p.k_prime = static_cast<int64_t>(std::ceil(p.c * config.k));
  return p;
}

absl::StatusOr<std::pair<ThresholdDb, ThresholdDb>> AuditDatabases(
    const AuditConfig& config) {
  absl::StatusOr<RoundParams> params = AuditRoundParams(config);
  if (!params.ok()) return params.status();
  if (config.target_site < 1 || config.target_site > config.k ||
      config.target_block < 1 || config.target_block > params->k_prime) {
    return absl::InvalidArgumentError(absl::StrCat(
        "audit target (", config.target_site, ", ", config.target_block,
        ") outside database of ", config.k, " x ", params->k_prime));
  }
  for (int64_t r : {config.threshold_d, config.threshold_d_prime}) {
    if (r < 1 || r > config.block_size) {
      return absl::InvalidArgumentError(
          absl::StrCat("target threshold ", r, " outside {1..", config.block_size, "}"));
    }
  }
  ThresholdDb d(config.k);
  for (int32_t i = 0; i < config.k; ++i) {
    RngStream rng = DeriveStream(
        config.database_seed,
        {{EntityTag::kDatabase, 0}, {EntityTag::kSite, static_cast<uint64_t>(i + 1)}});
    d[i].resize(params->k_prime);
    for (int64_t& r : d[i]) r = *SampleUniformThreshold(rng, config.block_size);
  }
  d[config.target_site - 1][config.target_block - 1] = config.threshold_d;
  ThresholdDb d_prime = d;
  if (!config.identical) {
    d_prime[config.target_site - 1][config.target_block - 1] =
        config.threshold_d_prime;
  }
  return std::make_pair(std::move(d), std::move(d_prime));
}

namespace {

struct TrialOutcome {
  bool leaked = false;
  EventKey signature;
};

absl::StatusOr<TrialOutcome> RunAuditTrial(const AuditConfig& config,
                                           const RoundParams& params,
                                           const ThresholdDb& db, uint64_t side,
                                           int64_t trial) {
  RobustTrackerOptions options;
  options.k = config.k;
  options.alpha = config.alpha;
  options.beta = config.beta;
  options.noise_mode = config.noise_mode;
  options.seed = DeriveSeed(config.seed, {{EntityTag::kAudit, side},
                                          {EntityTag::kTrial, static_cast<uint64_t>(trial)}});
  options.first_round = params;
  options.first_round_thresholds = db;
  absl::StatusOr<std::unique_ptr<RobustTracker>> tracker = RobustTracker::Create(options);
  if (!tracker.ok()) return tracker.status();

  absl::StatusOr<std::unique_ptr<Adversary>> adversary =
      config.adversary == AuditAdversary::kRoundRobin
          ? MakeReplayAdversary(ReplaySchedule::RoundRobin(), config.k,
                                config.items, DeriveStream(0, {}))
          : MakeStopOnFireAdversary(config.k, config.items);
  if (!adversary.ok()) return adversary.status();

  Transcript transcript;
  transcript.Reserve(config.items);
  std::vector<ItemLogEntry> log;
  log.reserve(config.items);
  TranscriptView view(transcript);
  while (std::optional<StepAction> action = (*adversary)->NextAction(view)) {
    absl::StatusOr<Announcement> ann = (*tracker)->Step(*action);
    if (!ann.ok()) return ann.status();
    transcript.Append(*action, *ann, (*tracker)->true_count());
    log.push_back((*tracker)->last_item_log());
  }

  absl::StatusOr<LeakSet> leaks = ComputeLeakSet(transcript, log);
  if (!leaks.ok()) return leaks.status();
  TrialOutcome out;
  out.leaked = leaks->Contains({0, config.target_site, config.target_block});
  if (out.leaked) return out;

  // Observable signature: the step of every announcement change, with the
  // released estimate bucketed at one block (width Delta in estimate units).
  for (size_t t = 0; t < transcript.size(); ++t) {
    const Announcement& a = transcript[t].announcement;
    if (!a.is_update()) continue;
    const int64_t step = static_cast<int64_t>(t + 1);
    if (a.is_release()) {
      out.signature.push_back(step);
      out.signature.push_back(static_cast<int64_t>(std::floor(
          (a.released - static_cast<double>(params.n0)) /
          static_cast<double>(params.delta))));
    }
    if (a.is_sync()) out.signature.push_back(-step);
  }
  return out;
}

}  // namespace

absl::StatusOr<AuditReport> AuditPartialDp(const AuditConfig& config) {
  if (config.trials < 1 || config.items < 0) {
    return absl::InvalidArgumentError("audit needs trials >= 1 and items >= 0");
  }
  absl::StatusOr<RoundParams> params = AuditRoundParams(config);
  if (!params.ok()) return params.status();
  absl::StatusOr<std::pair<ThresholdDb, ThresholdDb>> dbs = AuditDatabases(config);
  if (!dbs.ok()) return dbs.status();

  AuditReport report;
  report.params = *params;
  report.epsilon = params->c / params->s;

  std::vector<EventCounts> histograms(2);
  std::vector<int64_t> surviving(2, 0);
  for (uint64_t side = 0; side < 2; ++side) {
    const ThresholdDb& db = side == 0 ? dbs->first : dbs->second;
    std::vector<absl::StatusOr<TrialOutcome>> outcomes(config.trials);
    ParallelFor(config.trials, config.workers, [&](int64_t trial) {
      outcomes[trial] = RunAuditTrial(config, *params, db, side, trial);
    });
    for (absl::StatusOr<TrialOutcome>& outcome : outcomes) {
      if (!outcome.ok()) return outcome.status();
      if (outcome->leaked) continue;
      ++surviving[side];
      ++histograms[side][std::move(outcome->signature)];
    }
  }
  report.surviving_d = surviving[0];
  report.surviving_d_prime = surviving[1];
  report.probe = CompareEventHistograms(histograms[0], config.trials,
                                        histograms[1], config.trials,
                                        report.epsilon, config.min_count,
                                        config.level);
  if (report.probe.violation) {
    report.verdict = AuditVerdict::kViolation;
  } else if (report.probe.events_tested == 0 ||
             std::min(report.surviving_d, report.surviving_d_prime) <
                 config.min_count) {
    report.verdict = AuditVerdict::kInconclusive;
  } else {
    report.verdict = AuditVerdict::kNoViolation;
  }
  return report;
}

const char* AuditVerdictName(AuditVerdict verdict) {
  switch (verdict) {
    case AuditVerdict::kNoViolation:
      return "no-violation";
    case AuditVerdict::kViolation:
      return "violation";
    case AuditVerdict::kInconclusive:
      return "inconclusive";
  }
  return "unknown";
}

void WriteAuditReport(const AuditReport& report, std::ostream& out) {
  out << absl::StrFormat(
      "# k=%d s=%d C=%.6f delta=%d epsilon=%.6f trials=%d survivors D=%d D'=%d "
      "events=%d\n",
      report.params.k, report.params.s, report.params.c, report.params.delta,
      report.epsilon, report.probe.trials_a, report.surviving_d,
      report.surviving_d_prime, report.probe.events_tested);
  out << absl::StrFormat("%-40s %10s %10s %10s %23s %s\n", "event", "count_D",
                         "count_D'", "log_ratio", "ci", "verdict");
  for (const EventComparison& e : report.probe.events) {
    out << absl::StrFormat("%-40s %10d %10d %10.4f [%10.4f,%10.4f] %s\n",
                           FormatEventKey(e.event), e.count_a, e.count_b,
                           e.log_ratio, e.ci.lower, e.ci.upper,
                           e.violation ? "VIOLATION" : "ok");
  }
  out << absl::StrFormat("# max |log ratio| lower bound %.4f (epsilon %.4f): %s\n",
                         report.probe.max_abs_lower, report.epsilon,
                         AuditVerdictName(report.verdict));
}

}  // namespace dptrack
