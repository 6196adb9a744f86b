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

#include "allocdp/utility_sim.h"

#include <cmath>
#include <random>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "allocdp/log_math.h"
#include "allocdp/parallel.h"
#include "allocdp/status_macros.h"

namespace allocdp {

std::string_view UtilitySchemeName(UtilityScheme scheme) {
  return scheme == UtilityScheme::kAllocation ? "allocation" : "poisson";
}

absl::StatusOr<UtilityScheme> ParseUtilityScheme(std::string_view name) {
  if (name == "allocation") return UtilityScheme::kAllocation;
  if (name == "poisson") return UtilityScheme::kPoisson;
  return absl::InvalidArgumentError(
      absl::StrFormat("unknown utility scheme '%s'", std::string(name)));
}

absl::Status ValidateUtilityConfig(const UtilityConfig& c) {
  if (!(c.p >= 0 && c.p <= 1)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("p must lie in [0, 1], got %g", c.p));
  }
  if (c.n < 1 || c.t < 1 || c.trials < 1 || c.dim < 1) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "n, t, trials and dim must be >= 1 (n=%d t=%d trials=%d dim=%d)", c.n,
        c.t, c.trials, c.dim));
  }
  if (!(c.sigma >= 0) || !std::isfinite(c.sigma)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("sigma must be non-negative and finite, got %g",
                        c.sigma));
  }
  return absl::OkStatus();
}

absl::StatusOr<AnalyticMse> ComputeAnalyticMse(const UtilityConfig& c) {
  RETURN_IF_ERROR(ValidateUtilityConfig(c));
  const double n = static_cast<double>(c.n);
  const double privacy = static_cast<double>(c.dim) *
                         static_cast<double>(c.t) * c.sigma * c.sigma /
                         (n * n);
  const double sampling = c.p * (1.0 - c.p) / n;
  if (c.scheme == UtilityScheme::kAllocation) {
    return AnalyticMse{sampling + privacy, false};
  }
  return AnalyticMse{sampling + c.p / n + privacy, true};
}

absl::StatusOr<SimulatedMse> SimulateMse(const UtilityConfig& c,
                                         int threads) {
  RETURN_IF_ERROR(ValidateUtilityConfig(c));
  if (c.trials < 100) {
    return absl::InvalidArgumentError(
        absl::StrFormat("trials must be >= 100, got %d", c.trials));
  }
  const double n = static_cast<double>(c.n);
  const double noise_sd =
      c.sigma * std::sqrt(static_cast<double>(c.dim) *
                          static_cast<double>(c.t));
  std::vector<double> errors(c.trials);
  ParallelFor(c.trials, threads, [&](int64_t i) {
    std::mt19937_64 engine(SubstreamSeed(c.seed, i));
    std::binomial_distribution<int64_t> data(c.n, c.p);
    const int64_t ones = data(engine);
    double total = static_cast<double>(ones);
    if (c.scheme == UtilityScheme::kPoisson) {
      std::binomial_distribution<int64_t> joins(ones * c.t,
                                                1.0 / static_cast<double>(c.t));
      total = static_cast<double>(joins(engine));
    }
    if (noise_sd > 0) {
      std::normal_distribution<double> noise(0.0, noise_sd);
      total += noise(engine);
    }
    errors[i] = total / n - c.p;
  });

  KahanSum sum_sq;
  KahanSum sum_sq2;
  KahanSum sum_err;
  for (double e : errors) {
    sum_sq.Add(e * e);
    sum_sq2.Add(e * e * e * e);
    sum_err.Add(e);
  }
  const double trials = static_cast<double>(c.trials);
  const double mse = sum_sq.Sum() / trials;
  const double var_sq =
      std::max(0.0, (sum_sq2.Sum() / trials - mse * mse)) * trials /
      (trials - 1.0);
  const double mean_err = sum_err.Sum() / trials;
  const double var_err =
      std::max(0.0, mse - mean_err * mean_err) * trials / (trials - 1.0);
  return SimulatedMse{mse, std::sqrt(var_sq / trials), c.p + mean_err,
                      std::sqrt(var_err / trials)};
}

absl::StatusOr<double> CalibrateSigma(const SchemeSpec& spec, double epsilon,
                                      const Delta& delta, double lo,
                                      double hi) {
  if (!(epsilon > 0) || !(lo > 0) || !(hi > lo)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "need epsilon > 0 and 0 < lo < hi, got %g, %g, %g", epsilon, lo, hi));
  }
  auto eps_at = [&](double sigma) -> absl::StatusOr<double> {
    SchemeSpec s = spec;
    s.sigma = sigma;
    ASSIGN_OR_RETURN(const BoundResult r, ComputeEpsilon(s, delta));
    return r.value;
  };
  ASSIGN_OR_RETURN(const double at_hi, eps_at(hi));
  if (at_hi > epsilon) {
    return absl::OutOfRangeError(absl::StrFormat(
        "target unattainable: epsilon(sigma=%g) = %g > %g", hi, at_hi,
        epsilon));
  }
  ASSIGN_OR_RETURN(const double at_lo, eps_at(lo));
  if (at_lo <= epsilon) return lo;
  // Bisection in log sigma; hi always satisfies the target.
  while (hi / lo > 1.0 + 1e-6) {
    const double mid = std::sqrt(lo * hi);
    ASSIGN_OR_RETURN(const double e, eps_at(mid));
    (e <= epsilon ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace allocdp
