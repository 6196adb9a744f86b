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

#include "allocdp/alloc_config.h"

#include <cmath>

#include "absl/strings/str_format.h"

namespace allocdp {

absl::Status ValidateAllocConfig(const AllocConfig& config) {
  if (!(config.sigma > 0) || !std::isfinite(config.sigma)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "sigma must be positive and finite, got %g", config.sigma));
  }
  if (config.t < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("t must be >= 1, got %d", config.t));
  }
  if (config.k < 1 || config.k > config.t) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "k must lie in [1, t] = [1, %d], got %d", config.t, config.k));
  }
  if (config.epochs < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("epochs must be >= 1, got %d", config.epochs));
  }
  return absl::OkStatus();
}

absl::StatusOr<BlockDecomposition> MultiAllocReduce(int64_t t, int64_t k) {
  if (k < 1 || t < 1 || k > t) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "block reduction needs 1 <= k <= t, got t=%d k=%d", t, k));
  }
  return BlockDecomposition{t / k, k};
}

}  // namespace allocdp
