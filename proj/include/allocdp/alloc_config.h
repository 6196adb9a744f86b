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

#ifndef ALLOCDP_ALLOC_CONFIG_H_
#define ALLOCDP_ALLOC_CONFIG_H_

#include <cstdint>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "allocdp/core_dp.h"

namespace allocdp {

// Random k-out-of-t allocation of the Gaussian mechanism with noise sigma,
// repeated for `epochs` epochs.
struct AllocConfig {
  double sigma = 1.0;
  int64_t t = 1;
  int64_t k = 1;
  int64_t epochs = 1;
  Direction direction = Direction::kBoth;
};

absl::Status ValidateAllocConfig(const AllocConfig& config);

// k-out-of-t allocation is dominated by k composed 1-out-of-floor(t/k)
// allocations.
struct BlockDecomposition {
  int64_t t_prime;
  int64_t blocks;
};

absl::StatusOr<BlockDecomposition> MultiAllocReduce(int64_t t, int64_t k);

}  // namespace allocdp

#endif  // ALLOCDP_ALLOC_CONFIG_H_
