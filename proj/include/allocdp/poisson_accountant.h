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

// RDP accounting for Poisson subsampling of the Gaussian mechanism.
//
// A single step is dominated by the pair
//   M = lambda N(1, sigma^2) + (1 - lambda) N(0, sigma^2),  Q = N(0, sigma^2)
// with D_alpha(M || Q) in the remove direction and D_alpha(Q || M) in the add
// direction. Steps compose order-wise and the composed curve is converted to
// (epsilon, delta).

#ifndef ALLOCDP_POISSON_ACCOUNTANT_H_
#define ALLOCDP_POISSON_ACCOUNTANT_H_

#include <cstdint>
#include <optional>

#include "absl/status/statusor.h"
#include "allocdp/core_dp.h"

namespace allocdp {

struct PoissonConfig {
  double sigma = 1.0;
  int64_t t = 1;
  double lambda = 1.0;
  Direction direction = Direction::kBoth;
};

absl::Status ValidatePoissonConfig(const PoissonConfig& config);

// Remove-direction RDP of one subsampled step at integer alpha >= 2, from the
// binomial expansion of E_Q[(M/Q)^alpha].
absl::StatusOr<double> PoissonRdpRemoveStep(double sigma, double lambda,
                                            int alpha);

// Add-direction RDP of one subsampled step at real alpha > 1, by adaptive
// Gauss-Kronrod quadrature of Q^alpha M^(1-alpha). Results are memoized per
// (sigma, lambda, alpha); the memo is safe for concurrent use.
absl::StatusOr<double> PoissonRdpAddStep(double sigma, double lambda,
                                         double alpha);

// Per-step curve over orders 2..max_alpha for one direction (kBoth is
// rejected).
absl::StatusOr<RdpCurve> PoissonStepCurve(double sigma, double lambda,
                                          Direction direction,
                                          int max_alpha = kDefaultMaxAlpha);

// Both one-sided composed curves of a Poisson scheme, computed once and
// reused for any number of delta or epsilon queries.
class PoissonProfile {
 public:
  // `compositions` is the total number of subsampled steps composed (t steps
  // times the number of epochs). Only the curves needed for `direction` are
  // built.
  static absl::StatusOr<PoissonProfile> Create(
      double sigma, double lambda, int64_t compositions, Direction direction,
      int max_alpha = kDefaultMaxAlpha);

  double lambda() const { return lambda_; }

  // One-sided or combined (max) delta at epsilon > 0. Exactly zero for
  // lambda = 0.
  absl::StatusOr<RdpDelta> DeltaAt(double epsilon, Direction direction) const;
  // One-sided or combined (max) epsilon at delta in (0, 1). Zero for
  // lambda = 0.
  absl::StatusOr<RdpEpsilon> EpsilonAt(const Delta& delta,
                                       Direction direction) const;

  const std::optional<RdpCurve>& remove_curve() const { return remove_; }
  const std::optional<RdpCurve>& add_curve() const { return add_; }

 private:
  PoissonProfile(double lambda, std::optional<RdpCurve> remove,
                 std::optional<RdpCurve> add)
      : lambda_(lambda), remove_(std::move(remove)), add_(std::move(add)) {}
  absl::StatusOr<const RdpCurve*> CurveFor(Direction direction) const;

  double lambda_;
  std::optional<RdpCurve> remove_;
  std::optional<RdpCurve> add_;
};

// Delta of `compositions` composed steps; kBoth takes the maximum.
absl::StatusOr<Delta> PoissonDelta(const PoissonConfig& config, double epsilon,
                                   int64_t compositions);

// Epsilon of `compositions` composed steps with the minimizing order (for
// kBoth, the order of the direction that attains the maximum).
absl::StatusOr<RdpEpsilon> PoissonEpsilon(const PoissonConfig& config,
                                          const Delta& delta,
                                          int64_t compositions);

}  // namespace allocdp

#endif  // ALLOCDP_POISSON_ACCOUNTANT_H_
