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

// dptrack: run tracking experiments, privacy audits and scaling sweeps.
//
//   dptrack run --mechanism robust --adversary stop_on_fire --trials 20
//   dptrack audit --identical
//   dptrack sweep --ks 4,16,64 --mechanisms robust,deterministic
//
// Exit codes: 0 success (audit: no violation), 1 runtime error (audit:
// violation flagged), 2 configuration error, 3 inconclusive audit.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "dptrack/config.h"
#include "dptrack/harness.h"
#include "dptrack/parallel.h"
#include "dptrack/privacy_audit.h"
#include "dptrack/tracking_core.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInconclusive = 3;

// Flags shared by `run` and `sweep`, kept as raw strings so that they go
// through the same parser as config-file values and can override them.
struct ExperimentFlags {
  std::optional<std::string> config_path;
  std::vector<std::pair<std::string, std::optional<std::string>>> values = {
      {"mechanism", {}}, {"adversary", {}}, {"k", {}},     {"alpha", {}},
      {"delta", {}},     {"items", {}},     {"trials", {}}, {"seed", {}},
      {"noise_mode", {}}, {"out_path", {}}, {"workers", {}}, {"c0", {}}};

  void Register(CLI::App* app, bool with_sweep_axes) {
    app->add_option("--config", config_path, "key=value config file");
    for (auto& [key, value] : values) {
      if (with_sweep_axes && (key == "mechanism" || key == "k" || key == "alpha")) {
        continue;
      }
      std::string flag = key == "out_path" ? "--out" : "--" + key;
      for (char& c : flag) c = c == '_' ? '-' : c;
      app->add_option(flag, value);
    }
  }

  absl::StatusOr<dptrack::RunConfig> Resolve() const {
    dptrack::RunConfig config;
    config.experiment.workers = dptrack::DefaultWorkers();
    if (config_path) {
      if (absl::Status st = dptrack::LoadConfigFile(*config_path, config); !st.ok()) {
        return st;
      }
    }
    for (const auto& [key, value] : values) {
      if (!value) continue;
      if (absl::Status st = dptrack::ApplyConfigValue(key, *value, config); !st.ok()) {
        return st;
      }
    }
    if (absl::Status st = dptrack::ValidateConfig(config.experiment); !st.ok()) {
      return st;
    }
    return config;
  }
};

int ConfigError(const absl::Status& status) {
  std::fprintf(stderr, "config error: %s\n", std::string(status.message()).c_str());
  return kExitConfig;
}

int RuntimeError(const absl::Status& status) {
  std::fprintf(stderr, "error: %s\n", status.ToString().c_str());
  return kExitRuntime;
}

std::string SummaryPath(const std::string& csv_path) {
  std::filesystem::path p(csv_path);
  p.replace_extension(".summary.json");
  return p.string();
}

int CmdRun(const ExperimentFlags& flags) {
  absl::StatusOr<dptrack::RunConfig> config = flags.Resolve();
  if (!config.ok()) return ConfigError(config.status());
  absl::StatusOr<dptrack::AggregateReport> report =
      dptrack::RunTrials(config->experiment);
  if (!report.ok()) return RuntimeError(report.status());

  std::ofstream csv(config->out_path, std::ios::binary);
  dptrack::WriteTrialsCsv(*report, csv);
  const std::string summary_path = SummaryPath(config->out_path);
  std::ofstream summary(summary_path, std::ios::binary);
  dptrack::WriteSummaryJson(*report, summary);
  if (!csv || !summary) {
    return RuntimeError(absl::UnavailableError("cannot write " + config->out_path));
  }
  std::printf(
      "%s %s k=%d trials=%lld failure_fraction=%.4f ci=[%.4f, %.4f] "
      "mean_words=%.1f -> %s\n",
      dptrack::MechanismName(config->experiment.mechanism).c_str(),
      dptrack::AdversaryName(config->experiment.adversary).c_str(),
      config->experiment.k, static_cast<long long>(config->experiment.trials),
      report->failure_fraction, report->failure_ci.lower,
      report->failure_ci.upper, report->mean_total_words,
      config->out_path.c_str());
  return kExitOk;
}

struct SweepFlags {
  std::string ks = "4,16,64";
  std::string alphas = "0.1";
  std::string mechanisms = "robust,deterministic";
};

int CmdSweep(const ExperimentFlags& flags, const SweepFlags& sweep) {
  absl::StatusOr<dptrack::RunConfig> config = flags.Resolve();
  if (!config.ok()) return ConfigError(config.status());
  absl::StatusOr<std::vector<int32_t>> ks = dptrack::ParseIntList(sweep.ks);
  if (!ks.ok()) return ConfigError(ks.status());
  absl::StatusOr<std::vector<double>> alphas = dptrack::ParseDoubleList(sweep.alphas);
  if (!alphas.ok()) return ConfigError(alphas.status());
  absl::StatusOr<std::vector<dptrack::MechanismKind>> mechanisms =
      dptrack::ParseMechanismList(sweep.mechanisms);
  if (!mechanisms.ok()) return ConfigError(mechanisms.status());
  for (int32_t k : *ks) {
    for (double alpha : *alphas) {
      dptrack::ExperimentConfig point = config->experiment;
      point.k = k;
      point.alpha = alpha;
      if (absl::Status st = dptrack::ValidateConfig(point); !st.ok()) {
        return ConfigError(st);
      }
    }
  }

  absl::StatusOr<std::vector<dptrack::SweepRow>> rows =
      dptrack::RunSweep(config->experiment, *ks, *alphas, *mechanisms);
  if (!rows.ok()) return RuntimeError(rows.status());
  const std::string out_path =
      config->out_path == dptrack::RunConfig().out_path ? "sweep.csv"
                                                        : config->out_path;
  std::ofstream out(out_path, std::ios::binary);
  dptrack::WriteSweepCsv(*rows, out);
  if (!out) return RuntimeError(absl::UnavailableError("cannot write " + out_path));
  dptrack::WriteSweepCsv(*rows, std::cout);
  return kExitOk;
}

struct AuditFlags {
  dptrack::AuditConfig config;
  std::string noise_mode = "standard";
  std::string adversary = "round_robin";
  std::optional<std::string> out_path;
};

int CmdAudit(AuditFlags flags) {
  dptrack::AuditConfig& config = flags.config;
  if (config.k < 1) return ConfigError(absl::InvalidArgumentError("k must be >= 1"));
  if (dptrack::CeilSqrt(config.k) > 4) {
    return ConfigError(absl::InvalidArgumentError(absl::StrFormat(
        "audit needs ceil(sqrt(k)) <= 4 (k <= 16), got k=%d", config.k)));
  }
  absl::StatusOr<dptrack::NoiseMode> mode = dptrack::ParseNoiseMode(flags.noise_mode);
  if (!mode.ok()) return ConfigError(mode.status());
  config.noise_mode = *mode;
  if (flags.adversary == "round_robin") {
    config.adversary = dptrack::AuditAdversary::kRoundRobin;
  } else if (flags.adversary == "stop_on_fire") {
    config.adversary = dptrack::AuditAdversary::kStopOnFire;
  } else {
    return ConfigError(absl::InvalidArgumentError(
        "audit adversary must be round_robin or stop_on_fire"));
  }
  if (absl::Status st = dptrack::AuditDatabases(config).status(); !st.ok()) {
    return ConfigError(st);
  }
  absl::StatusOr<dptrack::AuditReport> report = dptrack::AuditPartialDp(config);
  if (!report.ok()) {
    return absl::IsInvalidArgument(report.status()) ? ConfigError(report.status())
                                                    : RuntimeError(report.status());
  }
  if (flags.out_path) {
    std::ofstream out(*flags.out_path, std::ios::binary);
    dptrack::WriteAuditReport(*report, out);
    if (!out) {
      return RuntimeError(absl::UnavailableError("cannot write " + *flags.out_path));
    }
  }
  dptrack::WriteAuditReport(*report, std::cout);
  switch (report->verdict) {
    case dptrack::AuditVerdict::kNoViolation:
      return kExitOk;
    case dptrack::AuditVerdict::kViolation:
      return 1;
    case dptrack::AuditVerdict::kInconclusive:
      return kExitInconclusive;
  }
  return kExitRuntime;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed count tracking experiments"};
  app.require_subcommand(1);

  ExperimentFlags run_flags;
  CLI::App* run = app.add_subcommand("run", "run trials and write per-trial CSV");
  run_flags.Register(run, /*with_sweep_axes=*/false);

  ExperimentFlags sweep_flags;
  SweepFlags sweep_axes;
  CLI::App* sweep = app.add_subcommand("sweep", "scaling table over k and alpha");
  sweep_flags.Register(sweep, /*with_sweep_axes=*/true);
  sweep->add_option("--ks", sweep_axes.ks, "comma-separated k values")
      ->capture_default_str();
  sweep->add_option("--alphas", sweep_axes.alphas, "comma-separated alpha values")
      ->capture_default_str();
  sweep->add_option("--mechanisms", sweep_axes.mechanisms,
                    "comma-separated mechanisms")
      ->capture_default_str();

  AuditFlags audit_flags;
  audit_flags.config.workers = dptrack::DefaultWorkers();
  dptrack::AuditConfig& ac = audit_flags.config;
  CLI::App* audit = app.add_subcommand("audit", "empirical partial-DP audit");
  audit->add_option("--k", ac.k)->capture_default_str();
  audit->add_option("--block-size", ac.block_size)->capture_default_str();
  audit->add_option("--beta", ac.beta)->capture_default_str();
  audit->add_option("--n0", ac.n0)->capture_default_str();
  audit->add_option("--items", ac.items)->capture_default_str();
  audit->add_option("--trials", ac.trials)->capture_default_str();
  audit->add_option("--seed", ac.seed)->capture_default_str();
  audit->add_option("--database-seed", ac.database_seed)->capture_default_str();
  audit->add_option("--target-site", ac.target_site)->capture_default_str();
  audit->add_option("--target-block", ac.target_block)->capture_default_str();
  audit->add_option("--threshold-d", ac.threshold_d)->capture_default_str();
  audit->add_option("--threshold-d-prime", ac.threshold_d_prime)
      ->capture_default_str();
  audit->add_flag("--identical", ac.identical, "use D' = D");
  audit->add_option("--noise-mode", audit_flags.noise_mode)->capture_default_str();
  audit->add_option("--adversary", audit_flags.adversary,
                    "round_robin or stop_on_fire")
      ->capture_default_str();
  audit->add_option("--min-count", ac.min_count)->capture_default_str();
  audit->add_option("--workers", ac.workers);
  audit->add_option("--out", audit_flags.out_path, "also write the report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  if (run->parsed()) return CmdRun(run_flags);
  if (sweep->parsed()) return CmdSweep(sweep_flags, sweep_axes);
  if (audit->parsed()) return CmdAudit(audit_flags);
  return kExitConfig;
}
