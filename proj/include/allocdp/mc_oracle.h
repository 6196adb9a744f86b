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

// Naive Monte-Carlo estimates of the hockey-stick divergence between the
// allocation of the Gaussian pair and t null steps.
//
// With r(Z) = (1/t) sum_i exp((2 Z_i - 1) / (2 sigma^2)) the likelihood ratio
// of the two outputs,
//   remove: E_P [1 - e^eps / r]_+,  Z_1 ~ N(1, sigma^2), Z_{i>1} ~ N(0, sigma^2)
//   add:    E_Q [1 - e^eps r]_+,    Z ~ N(0, sigma^2)^t.
// r is symmetric in its coordinates, so the shifted step is always the first.
//
// Samples are split into fixed shards of kShardSize, each driven by its own
// seeded engine, and reduced in shard order: results depend on the seed only,
// never on the worker count.

#ifndef ALLOCDP_MC_ORACLE_H_
#define ALLOCDP_MC_ORACLE_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "allocdp/core_dp.h"

namespace allocdp {

struct McEstimate {
  double estimate;
  double ci_low;
  double ci_high;
  int64_t n_samples;
  double confidence;
  uint64_t seed;
};

inline constexpr int64_t kShardSize = 1 << 16;

// sqrt(ln(2 / (1 - confidence)) / (2 n)).
double HoeffdingHalfWidth(int64_t n, double confidence);

struct McOptions {
  int64_t n = 1000000;
  uint64_t seed = 0;
  double confidence = 0.99;
  // <= 0 selects DefaultThreadCount().
  int threads = 0;
};

absl::StatusOr<McEstimate> McDeltaRemove(double sigma, int64_t t,
                                         double epsilon,
                                         const McOptions& options);

absl::StatusOr<McEstimate> McDeltaAdd(double sigma, int64_t t, double epsilon,
                                      const McOptions& options);

// Estimates at several thresholds from one set of samples. `direction` must
// be one-sided. Each entry matches the single-threshold call with the same
// options.
absl::StatusOr<std::vector<McEstimate>> McDeltaGrid(
    double sigma, int64_t t, std::span<const double> epsilons,
    Direction direction, const McOptions& options);

}  // namespace allocdp

#endif  // ALLOCDP_MC_ORACLE_H_
