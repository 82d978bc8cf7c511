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

#include "dptrack/config.h"

#include <fstream>
#include <sstream>

#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"

namespace dptrack {
namespace {

template <typename T>
absl::StatusOr<T> ParseNumber(absl::string_view key, absl::string_view value) {
  T out{};
  bool ok = false;
  if constexpr (std::is_floating_point_v<T>) {
    ok = absl::SimpleAtod(value, &out);
  } else {
    ok = absl::SimpleAtoi(value, &out);
  }
  if (!ok) {
    return absl::InvalidArgumentError(
        absl::StrCat("bad value for ", key, ": '", value, "'"));
  }
  return out;
}

}  // namespace

absl::StatusOr<MechanismKind> ParseMechanism(absl::string_view text) {
  if (text == "robust") return MechanismKind::kRobust;
  if (text == "oblivious") return MechanismKind::kOblivious;
  if (text == "deterministic") return MechanismKind::kDeterministic;
  return absl::InvalidArgumentError(absl::StrCat("unknown mechanism '", text, "'"));
}

absl::StatusOr<AdversarySpec> ParseAdversary(absl::string_view text) {
  AdversarySpec spec;
  if (text == "stop_on_fire") {
    spec.kind = AdversarySpec::Kind::kStopOnFire;
    return spec;
  }
  if (text == "update_chaser") {
    spec.kind = AdversarySpec::Kind::kUpdateChaser;
    return spec;
  }
  absl::string_view rest = text;
  if (!absl::ConsumePrefix(&rest, "replay:")) {
    return absl::InvalidArgumentError(absl::StrCat("unknown adversary '", text, "'"));
  }
  spec.kind = AdversarySpec::Kind::kReplay;
  if (rest == "round_robin") {
    spec.schedule = ReplaySchedule::RoundRobin();
    return spec;
  }
  if (absl::ConsumePrefix(&rest, "single_site:")) {
    absl::StatusOr<int32_t> site = ParseNumber<int32_t>("single_site", rest);
    if (!site.ok()) return site.status();
    spec.schedule = ReplaySchedule::SingleSite(*site);
    return spec;
  }
  if (absl::ConsumePrefix(&rest, "weighted:")) {
    absl::StatusOr<std::vector<double>> weights = ParseDoubleList(rest);
    if (!weights.ok()) return weights.status();
    spec.schedule = ReplaySchedule::Weighted(*std::move(weights));
    return spec;
  }
  return absl::InvalidArgumentError(absl::StrCat("unknown replay schedule '", text, "'"));
}

absl::StatusOr<NoiseMode> ParseNoiseMode(absl::string_view text) {
  if (text == "standard") return NoiseMode::kStandard;
  if (text == "disabled") return NoiseMode::kDisabled;
  return absl::InvalidArgumentError(absl::StrCat("unknown noise mode '", text, "'"));
}

absl::Status ApplyConfigValue(absl::string_view key, absl::string_view value,
                              RunConfig& config) {
  ExperimentConfig& e = config.experiment;
  absl::Status status;
  auto assign = [&status](auto parsed, auto& field) {
    if (parsed.ok()) {
      field = *parsed;
    } else {
      status = parsed.status();
    }
  };
  if (key == "mechanism") {
    assign(ParseMechanism(value), e.mechanism);
  } else if (key == "adversary") {
    assign(ParseAdversary(value), e.adversary);
  } else if (key == "k") {
    assign(ParseNumber<int32_t>(key, value), e.k);
  } else if (key == "alpha") {
    assign(ParseNumber<double>(key, value), e.alpha);
  } else if (key == "delta") {
    assign(ParseNumber<double>(key, value), e.delta);
  } else if (key == "items") {
    assign(ParseNumber<int64_t>(key, value), e.items);
  } else if (key == "trials") {
    assign(ParseNumber<int64_t>(key, value), e.trials);
  } else if (key == "seed") {
    assign(ParseNumber<uint64_t>(key, value), e.seed);
  } else if (key == "noise_mode") {
    assign(ParseNoiseMode(value), e.noise_mode);
  } else if (key == "c0") {
    assign(ParseNumber<int64_t>(key, value), e.c0);
  } else if (key == "workers") {
    assign(ParseNumber<int>(key, value), e.workers);
  } else if (key == "out_path") {
    if (value.empty()) return absl::InvalidArgumentError("empty out_path");
    config.out_path = std::string(value);
  } else {
    return absl::InvalidArgumentError(absl::StrCat("unknown config key '", key, "'"));
  }
  return status;
}

absl::Status ParseConfigText(absl::string_view text, RunConfig& config) {
  int line_no = 0;
  for (absl::string_view line : absl::StrSplit(text, '\n')) {
    ++line_no;
    line = absl::StripAsciiWhitespace(line);
    if (line.empty() || line.front() == '#') continue;
    const size_t eq = line.find('=');
    if (eq == absl::string_view::npos) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_no, ": expected key=value"));
    }
    const absl::string_view key = absl::StripAsciiWhitespace(line.substr(0, eq));
    const absl::string_view value = absl::StripAsciiWhitespace(line.substr(eq + 1));
    if (absl::Status st = ApplyConfigValue(key, value, config); !st.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_no, ": ", st.message()));
    }
  }
  return absl::OkStatus();
}

absl::Status LoadConfigFile(const std::string& path, RunConfig& config) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open config ", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  if (absl::Status st = ParseConfigText(buffer.str(), config); !st.ok()) {
    return absl::InvalidArgumentError(absl::StrCat(path, ": ", st.message()));
  }
  return absl::OkStatus();
}

absl::StatusOr<std::vector<int32_t>> ParseIntList(absl::string_view text) {
  std::vector<int32_t> out;
  for (absl::string_view item : absl::StrSplit(text, ',')) {
    absl::StatusOr<int32_t> v =
        ParseNumber<int32_t>("list", absl::StripAsciiWhitespace(item));
    if (!v.ok()) return v.status();
    out.push_back(*v);
  }
  return out;
}

absl::StatusOr<std::vector<double>> ParseDoubleList(absl::string_view text) {
  std::vector<double> out;
  for (absl::string_view item : absl::StrSplit(text, ',')) {
    absl::StatusOr<double> v =
        ParseNumber<double>("list", absl::StripAsciiWhitespace(item));
    if (!v.ok()) return v.status();
    out.push_back(*v);
  }
  return out;
}

absl::StatusOr<std::vector<MechanismKind>> ParseMechanismList(absl::string_view text) {
  std::vector<MechanismKind> out;
  for (absl::string_view item : absl::StrSplit(text, ',')) {
    absl::StatusOr<MechanismKind> m = ParseMechanism(absl::StripAsciiWhitespace(item));
    if (!m.ok()) return m.status();
    out.push_back(*m);
  }
  return out;
}

}  // namespace dptrack
