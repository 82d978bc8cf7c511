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

#include "dptrack/tracking_core.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/match.h"
#include "absl/strings/str_cat.h"

namespace dptrack {
namespace {

constexpr absl::string_view kBootstrapMessage = "bootstrap required";

bool InOpenUnit(double x) { return x > 0 && x < 1; }

}  // namespace

absl::Status Transcript::Validate(int64_t initial_count,
                                  double initial_value) const {
  int64_t count = initial_count;
  double value = initial_value;
  for (size_t t = 0; t < entries_.size(); ++t) {
    const TranscriptEntry& e = entries_[t];
    const int64_t expected = count + (e.action.is_deliver() ? 1 : 0);
    if (e.true_count != expected) {
      return absl::InternalError(absl::StrCat("transcript count mismatch at step ",
                                              t + 1, ": ", e.true_count,
                                              " vs ", expected));
    }
    const Announcement& a = e.announcement;
    if ((a.tag == AnnouncementTag::kNoChange) != (a.flags == 0)) {
      return absl::InternalError(
          absl::StrCat("announcement tag/flags disagree at step ", t + 1));
    }
    if (!a.is_update() && a.value != value) {
      return absl::InternalError(absl::StrCat(
          "NoChange announcement changed value at step ", t + 1));
    }
    count = e.true_count;
    value = a.value;
  }
  return absl::OkStatus();
}

int32_t CeilSqrt(int64_t k) {
  int64_t s = static_cast<int64_t>(std::sqrt(static_cast<double>(k)));
  while (s * s < k) ++s;
  while (s > 1 && (s - 1) * (s - 1) >= k) --s;
  return static_cast<int32_t>(std::max<int64_t>(s, 1));
}

double RoundConstantC(int32_t s, double beta) {
  const double log_s = std::log2(static_cast<double>(s));
  const double poly = s == 1 ? 0.0 : std::pow(log_s, 1.5);
  return std::sqrt((poly + 1.0) * std::log2(8.0 * s / beta));
}

absl::StatusOr<RoundParams> DeriveRoundParams(int64_t n0, int32_t k,
                                              double alpha, double beta) {
  if (k < 1 || n0 < 0 || !InOpenUnit(alpha) || !InOpenUnit(beta)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "round parameters out of range: n0=", n0, " k=", k, " alpha=", alpha,
        " beta=", beta));
  }
  RoundParams p;
  p.n0 = n0;
  p.k = k;
  p.s = CeilSqrt(k);
  p.alpha = alpha;
  p.beta = beta;
  p.c = RoundConstantC(p.s, beta);
  const double exact_delta = alpha * static_cast<double>(n0) / (8.0 * p.c * p.s);
  if (exact_delta < 1.0) {
    return absl::FailedPreconditionError(
        absl::StrCat(kBootstrapMessage, ": alpha*N0/(8Cs) = ", exact_delta));
  }
  p.delta = static_cast<int64_t>(std::floor(exact_delta));
  p.eps = p.c / p.s;
  p.threshold = 2.0 * p.c * p.s;
  p.k_prime = static_cast<int64_t>(std::ceil(p.c * k));
  return p;
}

bool IsBootstrapRequired(const absl::Status& status) {
  return absl::IsFailedPrecondition(status) &&
         absl::StartsWith(status.message(), kBootstrapMessage);
}

int64_t BootstrapThreshold(int32_t k, double alpha, double beta) {
  const int32_t s = CeilSqrt(k);
  const double c = RoundConstantC(s, beta);
  int64_t n = static_cast<int64_t>(std::ceil(8.0 * c * s / alpha));
  // Rounding at the boundary: settle on the first n the derivation accepts.
  while (n > 1 && DeriveRoundParams(n - 1, k, alpha, beta).ok()) --n;
  while (!DeriveRoundParams(n, k, alpha, beta).ok()) ++n;
  return n;
}

absl::StatusOr<double> DeriveGlobalBeta(double delta, double alpha, int32_t k,
                                        int64_t n_max) {
  if (!InOpenUnit(delta) || !(alpha > 0) || alpha > 1 || k < 1 || n_max < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("global beta parameters out of range: delta=", delta,
                     " alpha=", alpha, " k=", k, " n_max=", n_max));
  }
  const int32_t s = CeilSqrt(k);
  const double log_n = std::max(1.0, std::log2(static_cast<double>(n_max)));
  const double rounds = std::max(1.0, std::ceil(log_n / (alpha * s)));
  return delta / (s * rounds);
}

}  // namespace dptrack
