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

// Direct analysis of random 1-out-of-t allocation.
//
// Remove direction: the order-alpha Renyi divergence between the allocation
// of the real element and t null steps is an exact sum over the partitions of
// alpha into at most t parts,
//
//   exp((alpha-1) rho) = t^-alpha sum_Pi C(t; C(Pi)) C(alpha; Pi)
//                                 prod_{p in Pi} exp((p-1) rho_p),
//
// where rho_p is the per-step RDP at order p (rho_1 = 0).
//
// Add direction: the profile is bounded by a Gaussian pair with scale
// sqrt(t) sigma evaluated at a shifted threshold.

#ifndef ALLOCDP_ALLOC_RDP_H_
#define ALLOCDP_ALLOC_RDP_H_

#include <cstdint>
#include <optional>

#include "absl/status/statusor.h"
#include "allocdp/alloc_config.h"
#include "allocdp/core_dp.h"

namespace allocdp {

// ln sum_Pi C(t; C(Pi)) C(alpha; Pi) over partitions of alpha into at most t
// parts; equals alpha ln t.
double LogPartitionCoefficientSum(int64_t t, int alpha);

// Remove-direction RDP of 1-out-of-t allocation for a general randomizer whose
// per-step RDP at orders 2..alpha is given by `step_rdp`.
absl::StatusOr<double> AllocRdpRemoveGeneral(const RdpCurve& step_rdp,
                                             int64_t t, int alpha,
                                             int max_alpha = kDefaultMaxAlpha);

// Same for the Gaussian mechanism (rho_p = p / (2 sigma^2)). Exact, not an
// upper bound.
absl::StatusOr<double> AllocRdpRemoveGauss(double sigma, int64_t t, int alpha,
                                           int max_alpha = kDefaultMaxAlpha);

// Upper bound on the add-direction profile of 1-out-of-t allocation with
// Gaussian noise: GaussianDelta(sqrt(t) sigma, epsilon - (1 - 1/t)/(2 sigma^2)).
absl::StatusOr<Delta> AllocAddDeltaGauss(double sigma, int64_t t,
                                         double epsilon);

// Add-direction surrogate for `blocks` sequentially composed 1-out-of-t
// allocations: the per-block Gaussian pairs compose into a single Gaussian
// with scale sigma sqrt(t / blocks) at threshold epsilon - blocks * shift.
// Approximate: the composition of the surrogate is not itself proven.
absl::StatusOr<Delta> AllocAddDeltaGaussComposed(double sigma, int64_t t,
                                                 int64_t blocks,
                                                 double epsilon);
absl::StatusOr<double> AllocAddEpsilonGaussComposed(double sigma, int64_t t,
                                                    int64_t blocks,
                                                    const Delta& delta);

struct AllocRdpEpsilonResult {
  std::optional<double> remove;
  int remove_best_alpha = 0;
  std::optional<double> add;
  // Set when the add direction went through the composed surrogate.
  bool add_approximate = false;

  double Combined() const;
};

// Epsilon of the direct analysis for k-out-of-t allocation run for `epochs`
// epochs. The k > 1 case reduces to k floor(t/k)-step blocks; the remove
// curve is k * epochs * rho(alpha) and the add side inverts the composed
// surrogate.
absl::StatusOr<AllocRdpEpsilonResult> AllocRdpEpsilon(
    const AllocConfig& config, const Delta& delta,
    int max_alpha = kDefaultMaxAlpha);

struct AllocRdpDeltaResult {
  std::optional<Delta> remove;
  int remove_best_alpha = 0;
  std::optional<Delta> add;
  bool add_approximate = false;
};

absl::StatusOr<AllocRdpDeltaResult> AllocRdpDelta(
    const AllocConfig& config, double epsilon,
    int max_alpha = kDefaultMaxAlpha);

// Remove-direction curve over orders 2..max_alpha for one block.
absl::StatusOr<RdpCurve> AllocRdpRemoveCurve(double sigma, int64_t t,
                                             int max_alpha = kDefaultMaxAlpha);

}  // namespace allocdp

#endif  // ALLOCDP_ALLOC_RDP_H_
