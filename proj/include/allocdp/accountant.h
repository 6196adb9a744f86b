// Copyright 2026 The allocdp Authors
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

// Top-level accountant. For the allocation scheme every enabled method is
// evaluated per direction; the combined value is the per-direction minimum
// over methods followed by the maximum over directions.
//
//   SchemeSpec spec;
//   spec.scheme = Scheme::kAllocation;
//   spec.sigma = 1.0;
//   spec.t = 10000;
//   absl::StatusOr<BoundResult> r = ComputeEpsilon(spec, *Delta::FromValue(1e-8));
//
// Multi-block runs (k > 1 or epochs > 1) use k floor(t/k)-step blocks per
// epoch. Only the direct RDP method composes natively; the Gaussian corollary
// covers k > 1 within one epoch. Other methods report "k>1 unsupported".

#ifndef ALLOCDP_ACCOUNTANT_H_
#define ALLOCDP_ACCOUNTANT_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "allocdp/alloc_config.h"
#include "allocdp/core_dp.h"

namespace allocdp {

enum class Scheme { kLocal, kPoisson, kAllocation };

enum class Method { kDecomposition, kTruncatedPoisson, kRecursive, kDirectRdp };

inline constexpr Method kAllMethods[] = {
    Method::kDecomposition, Method::kTruncatedPoisson, Method::kRecursive,
    Method::kDirectRdp};

std::string_view SchemeName(Scheme scheme);
absl::StatusOr<Scheme> ParseScheme(std::string_view name);
std::string_view MethodName(Method method);
absl::StatusOr<Method> ParseMethod(std::string_view name);

struct SchemeSpec {
  Scheme scheme = Scheme::kAllocation;
  double sigma = 1.0;
  int64_t t = 1;
  int64_t k = 1;
  int64_t epochs = 1;
  // Poisson sampling rate; defaults to k/t.
  std::optional<double> lambda;
  Direction direction = Direction::kBoth;
  // Allocation methods to evaluate; empty means all.
  std::vector<Method> methods;
  int max_alpha = kDefaultMaxAlpha;
};

absl::Status ValidateSchemeSpec(const SchemeSpec& spec);

// Per-method outcome. A side holds epsilon or delta depending on what was
// solved for; an empty side with a non-empty `error` means infeasible.
struct MethodOutcome {
  Method method;
  std::optional<double> remove;
  std::optional<double> add;
  std::string error;
  std::vector<std::string> flags;
};

struct BoundResult {
  bool solved_for_epsilon = true;
  // The fixed input: delta when solving for epsilon, epsilon otherwise.
  double target = 0.0;
  Direction direction = Direction::kBoth;

  double value = 0.0;  // combined
  std::optional<double> remove;
  std::optional<double> add;
  // Winner of the direction that attains the combined value, and of each
  // direction. Empty for the baseline schemes.
  std::optional<Method> winning_method;
  std::optional<Method> remove_winner;
  std::optional<Method> add_winner;

  std::vector<MethodOutcome> methods;
  // Reference values at matched total participations (allocation only).
  // Poisson uses rate k/t over t * epochs steps; local is direction-free.
  std::optional<double> baseline_poisson;
  std::optional<double> baseline_poisson_remove;
  std::optional<double> baseline_poisson_add;
  std::optional<double> baseline_local;
  std::vector<std::string> diagnostics;
};

// Smallest epsilon such that every requested direction is (epsilon, delta)-DP
// under the best available bound; clamped at 0.
absl::StatusOr<BoundResult> ComputeEpsilon(const SchemeSpec& spec,
                                           const Delta& delta);

// Smallest certified delta at `epsilon` > 0.
absl::StatusOr<BoundResult> ComputeDelta(const SchemeSpec& spec,
                                         double epsilon);

// Slack grid for the truncated Poisson bound when solving for delta.
inline constexpr double kTruncatedSlackGrid[] = {
    1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8,
    1e-9, 1e-10, 1e-11, 1e-12, 1e-13, 1e-14};

}  // namespace allocdp

#endif  // ALLOCDP_ACCOUNTANT_H_
