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

// Flat key=value experiment configuration.
//
//   # comment
//   mechanism = robust
//   adversary = replay:round_robin
//   k = 16
//
// Recognized keys: mechanism, adversary, k, alpha, delta, items, trials, seed,
// noise_mode, out_path, c0, workers. Unknown keys are rejected.

#ifndef DPTRACK_CONFIG_H_
#define DPTRACK_CONFIG_H_

#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "dptrack/harness.h"
#include "dptrack/noise.h"

namespace dptrack {

struct RunConfig {
  ExperimentConfig experiment;
  std::string out_path = "trials.csv";
};

absl::StatusOr<MechanismKind> ParseMechanism(absl::string_view text);

// "replay:round_robin", "replay:single_site:N", "replay:weighted:w1,...,wk",
// "stop_on_fire" or "update_chaser".
absl::StatusOr<AdversarySpec> ParseAdversary(absl::string_view text);

// "standard" or "disabled".
absl::StatusOr<NoiseMode> ParseNoiseMode(absl::string_view text);

// Applies one key/value pair to `config`.
absl::Status ApplyConfigValue(absl::string_view key, absl::string_view value,
                              RunConfig& config);

// Parses the text of a config file on top of the values already in `config`.
absl::Status ParseConfigText(absl::string_view text, RunConfig& config);

absl::Status LoadConfigFile(const std::string& path, RunConfig& config);

// Comma-separated lists for sweeps.
absl::StatusOr<std::vector<int32_t>> ParseIntList(absl::string_view text);
absl::StatusOr<std::vector<double>> ParseDoubleList(absl::string_view text);
absl::StatusOr<std::vector<MechanismKind>> ParseMechanismList(absl::string_view text);

}  // namespace dptrack

#endif  // DPTRACK_CONFIG_H_
