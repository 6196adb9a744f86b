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

// Mean estimation of n Bernoulli(p) bits over t noisy summation steps.
//
// Allocation: every element lands in exactly one step, so the released total
// is sum_i x_i + N(0, t sigma^2). Poisson: each element joins each step with
// probability 1/t, which adds the variance of the participation counts.
// Estimates divide the released total by n.

#ifndef ALLOCDP_UTILITY_SIM_H_
#define ALLOCDP_UTILITY_SIM_H_

#include <cstdint>
#include <string_view>

#include "absl/status/statusor.h"
#include "allocdp/accountant.h"
#include "allocdp/core_dp.h"

namespace allocdp {

enum class UtilityScheme { kAllocation, kPoisson };

std::string_view UtilitySchemeName(UtilityScheme scheme);
absl::StatusOr<UtilityScheme> ParseUtilityScheme(std::string_view name);

struct UtilityConfig {
  UtilityScheme scheme = UtilityScheme::kAllocation;
  double p = 0.5;
  int64_t n = 100;
  int64_t t = 1;
  double sigma = 1.0;  // 0 disables the privacy noise
  int64_t trials = 1000;
  uint64_t seed = 0;
  // Dimension of the released vector; scales the privacy-noise variance.
  int64_t dim = 1;
};

absl::Status ValidateUtilityConfig(const UtilityConfig& config);

struct AnalyticMse {
  double mse;
  // Poisson drops the (1 - 1/t) factor of the participation variance.
  bool approximate;
};

// Allocation: p(1-p)/n + d t sigma^2 / n^2.
// Poisson:    p(1-p)/n + p/n + d t sigma^2 / n^2.
absl::StatusOr<AnalyticMse> ComputeAnalyticMse(const UtilityConfig& config);

struct SimulatedMse {
  double empirical_mse;
  double std_error;      // standard error of empirical_mse
  double mean_estimate;  // average estimate over trials
  double mean_std_error; // standard error of mean_estimate
};

// Requires trials >= 100. Trial i draws from its own substream of `seed`.
absl::StatusOr<SimulatedMse> SimulateMse(const UtilityConfig& config,
                                         int threads = 0);

// Smallest sigma in [lo, hi] (up to relative tolerance 1e-6) whose
// accountant epsilon at `delta` is at most `epsilon`. `spec.sigma` is
// ignored.
absl::StatusOr<double> CalibrateSigma(const SchemeSpec& spec, double epsilon,
                                      const Delta& delta, double lo = 0.05,
                                      double hi = 1000.0);

}  // namespace allocdp

#endif  // ALLOCDP_UTILITY_SIM_H_
