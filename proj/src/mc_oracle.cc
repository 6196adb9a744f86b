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

#include "allocdp/mc_oracle.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "allocdp/log_math.h"
#include "allocdp/parallel.h"
#include "allocdp/status_macros.h"

namespace allocdp {
namespace {

absl::Status Validate(double sigma, int64_t t, std::span<const double> eps,
                      Direction direction, const McOptions& options) {
  if (!(sigma > 0) || !std::isfinite(sigma)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("sigma must be positive and finite, got %g", sigma));
  }
  if (t < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("t must be >= 1, got %d", t));
  }
  if (options.n < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("n must be >= 1, got %d", options.n));
  }
  if (!(options.confidence > 0 && options.confidence < 1)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "confidence must lie in (0, 1), got %g", options.confidence));
  }
  if (direction == Direction::kBoth) {
    return absl::InvalidArgumentError("direction must be remove or add");
  }
  for (double e : eps) {
    if (std::isnan(e)) return absl::InvalidArgumentError("epsilon is NaN");
  }
  return absl::OkStatus();
}

}  // namespace

double HoeffdingHalfWidth(int64_t n, double confidence) {
  return std::sqrt(std::log(2.0 / (1.0 - confidence)) /
                   (2.0 * static_cast<double>(n)));
}

absl::StatusOr<std::vector<McEstimate>> McDeltaGrid(
    double sigma, int64_t t, std::span<const double> epsilons,
    Direction direction, const McOptions& options) {
  RETURN_IF_ERROR(Validate(sigma, t, epsilons, direction, options));
  const size_t m = epsilons.size();
  const int64_t shards = (options.n + kShardSize - 1) / kShardSize;
  const bool remove = direction == Direction::kRemove;
  const double inv_two_var = 1.0 / (2.0 * sigma * sigma);
  const double log_t = std::log(static_cast<double>(t));

  // shard_sums[s * m + j]: sum over shard s of the integrand at epsilons[j].
  std::vector<double> shard_sums(static_cast<size_t>(shards) * m, 0.0);
  ParallelFor(shards, options.threads, [&](int64_t s) {
    std::mt19937_64 engine(SubstreamSeed(options.seed, s));
    std::normal_distribution<double> normal(0.0, sigma);
    std::vector<KahanSum> sums(m);
    std::vector<double> exponents(t);
    const int64_t begin = s * kShardSize;
    const int64_t end = std::min(options.n, begin + kShardSize);
    for (int64_t i = begin; i < end; ++i) {
      for (int64_t j = 0; j < t; ++j) {
        double z = normal(engine);
        if (remove && j == 0) z += 1.0;
        exponents[j] = (2.0 * z - 1.0) * inv_two_var;
      }
      const double log_r = LogSumExp(exponents) - log_t;
      for (size_t j = 0; j < m; ++j) {
        const double x =
            remove ? epsilons[j] - log_r : epsilons[j] + log_r;
        if (x < 0) sums[j].Add(-std::expm1(x));
      }
    }
    for (size_t j = 0; j < m; ++j) shard_sums[s * m + j] = sums[j].Sum();
  });

  const double half = HoeffdingHalfWidth(options.n, options.confidence);
  std::vector<McEstimate> out;
  out.reserve(m);
  for (size_t j = 0; j < m; ++j) {
    KahanSum total;
    for (int64_t s = 0; s < shards; ++s) total.Add(shard_sums[s * m + j]);
    const double mean = std::clamp(
        total.Sum() / static_cast<double>(options.n), 0.0, 1.0);
    out.push_back(McEstimate{mean, std::max(0.0, mean - half),
                             std::min(1.0, mean + half), options.n,
                             options.confidence, options.seed});
  }
  return out;
}

absl::StatusOr<McEstimate> McDeltaRemove(double sigma, int64_t t,
                                         double epsilon,
                                         const McOptions& options) {
  ASSIGN_OR_RETURN(std::vector<McEstimate> v,
                   McDeltaGrid(sigma, t, std::span<const double>(&epsilon, 1),
                               Direction::kRemove, options));
  return v.front();
}

absl::StatusOr<McEstimate> McDeltaAdd(double sigma, int64_t t, double epsilon,
                                      const McOptions& options) {
  ASSIGN_OR_RETURN(std::vector<McEstimate> v,
                   McDeltaGrid(sigma, t, std::span<const double>(&epsilon, 1),
                               Direction::kAdd, options));
  return v.front();
}

}  // namespace allocdp
