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

// (epsilon, delta) bounds for 1-out-of-t allocation of the Gaussian mechanism
// that reduce to Poisson subsampling:
//
//  * decomposition:      delta_A(eps) <= gamma * delta_P(eps'; t, lambda)
//  * truncated Poisson:  delta_A(eps) <= delta_P(eps; t, eta) + t delta0 + delta'
//  * recursive:          delta_A(eps) <= delta_P(eps; t, eta) + tau * delta_A_add(eps')
//  * Gaussian corollary: delta_A(eps) <= delta_P(eps; t, 2k/t) + 2 delta
//
// The Poisson terms come from PoissonProfile (RDP accounting), so every bound
// here is an upper bound on the corresponding allocation profile.

#ifndef ALLOCDP_ALLOC_BOUNDS_H_
#define ALLOCDP_ALLOC_BOUNDS_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "absl/status/statusor.h"
#include "allocdp/alloc_config.h"
#include "allocdp/core_dp.h"

namespace allocdp {

// One-sided deltas; a side is present iff it was requested.
struct DirectionalDelta {
  std::optional<Delta> remove;
  std::optional<Delta> add;

  // Maximum over the present sides.
  Delta Combined() const;
};

struct DirectionalEpsilon {
  std::optional<double> remove;
  std::optional<double> add;

  double Combined() const;
};

// ---------------------------------------------------------------------------
// Decomposition bound.

struct DecompositionParams {
  double lambda;
  double gamma_remove;  // 1 / (1 - (1 - lambda)^t)

  static absl::StatusOr<DecompositionParams> Create(int64_t t, double lambda);

  double GammaAdd(double epsilon) const;
  double EpsRemove(double epsilon) const;
  double EpsAdd(double epsilon) const;
  // Inverse of EpsRemove.
  double EpsilonFromEpsRemove(double eps_remove) const;
};

// Requires k = 1 and epochs = 1. `lambda` defaults to 1/t.
// remove: gamma_remove * delta_P(eps_remove(eps)).
// add:    gamma_add(eps') * delta_P(eps_add(eps')) at eps' = min(eps, eps*),
//         eps* the minimizer over eps; beyond it the raw expression grows
//         while the profile cannot, so the bound is held flat.
absl::StatusOr<DirectionalDelta> DecompositionDelta(
    const AllocConfig& config, double epsilon,
    std::optional<double> lambda = std::nullopt);

absl::StatusOr<DirectionalEpsilon> DecompositionEpsilon(
    const AllocConfig& config, const Delta& delta,
    std::optional<double> lambda = std::nullopt);

// ---------------------------------------------------------------------------
// Truncated Poisson bound.

struct TruncatedPoissonParams {
  double eps0;
  double delta0;
  double delta_prime;
  double gamma;
  double eta;
  // gamma hit its 1 - 1/t ceiling, so eta = 1 and nothing is amplified.
  bool cap_active;
};

// gamma = min{cosh(eps0) sqrt((2/t) ln(1/delta')), 1 - 1/t}, eta = 1/(t(1-gamma)).
absl::StatusOr<TruncatedPoissonParams> MakeTruncatedPoissonParams(
    double eps0, double delta0, double delta_prime, int64_t t);

// Same with eps0 taken from the exact Gaussian profile at delta0.
absl::StatusOr<TruncatedPoissonParams> GaussianTruncatedPoissonParams(
    double sigma, double delta0, double delta_prime, int64_t t);

// Shares of the slack budget assigned to t * delta0; the rest goes to delta'.
inline constexpr double kSlackSplits[] = {1e-4, 1e-3, 1e-2, 0.1, 0.5,
                                          0.9,  0.99, 0.999, 0.9999};

struct TruncatedPoissonResult {
  DirectionalDelta delta;
  // Parameters of the best split per direction.
  std::optional<TruncatedPoissonParams> remove_params;
  std::optional<TruncatedPoissonParams> add_params;
  bool cap_active = false;
};

// Requires k = 1 and epochs = 1. Splits `slack_budget` between t * delta0 and
// delta' over kSlackSplits and keeps the best split per direction.
absl::StatusOr<TruncatedPoissonResult> TruncatedPoissonDelta(
    const AllocConfig& config, double epsilon, const Delta& slack_budget);

struct TruncatedPoissonEpsilonResult {
  DirectionalEpsilon epsilon;
  bool cap_active = false;
};

// Fractions of the target delta handed to the slack terms when solving for
// epsilon.
inline constexpr double kSlackFractions[] = {0.01, 0.05, 0.1, 0.2, 0.35,
                                             0.5,  0.65, 0.8, 0.9};

absl::StatusOr<TruncatedPoissonEpsilonResult> TruncatedPoissonEpsilon(
    const AllocConfig& config, const Delta& delta);

// ---------------------------------------------------------------------------
// Recursive bound.

struct RecursiveParams {
  double eps_prime;
  double eta;  // e^{2 eps'} / t
  double tau;  // 1 / (e^{eps'} (e^{eps'} - 1))

  // Rejects eps' <= 0 and eta > 1.
  static absl::StatusOr<RecursiveParams> Create(double eps_prime, int64_t t);
};

// An upper bound on the add-direction profile of the same allocation.
using AddBoundFn = std::function<absl::StatusOr<Delta>(double epsilon)>;

// Requires k = 1 and epochs = 1.
absl::StatusOr<DirectionalDelta> RecursiveDelta(const AllocConfig& config,
                                                double epsilon,
                                                double eps_prime,
                                                const AddBoundFn& base_add);

struct EpsPrimeChoice {
  double eps_prime = 0.0;
  std::optional<Delta> delta;
  // No grid point satisfied e^{2 eps'} <= t.
  bool fallback = false;
  // The minimizer sits on the first or last grid point.
  bool boundary_hit = false;
};

// Minimizes the one-sided recursive bound over eps' in {2 eps, 4 eps, ...}
// merged with a fixed lattice of half powers of two, all with
// e^{2 eps'} <= t, then refines by golden-section search between the
// neighbours of the best grid point. `direction` must be one-sided. On
// fallback the add side returns base_add(epsilon) and the remove side has no
// value.
absl::StatusOr<EpsPrimeChoice> OptimizeEpsPrime(const AllocConfig& config,
                                                double epsilon,
                                                Direction direction,
                                                const AddBoundFn& base_add);

struct RecursiveEpsilonChoice {
  double eps_prime = 0.0;
  // Empty when no eps' leaves budget for the Poisson term.
  std::optional<double> epsilon;
  bool fallback = false;
  bool boundary_hit = false;
};

// One-sided epsilon of the recursive bound at `delta`. For a fixed eps' the
// base term is constant, so epsilon = delta_P^{-1}(delta - tau' base_add(eps'))
// in closed form; eps' is searched over {2 h, 4 h, ...} and the same fixed
// lattice, with e^{2 eps'} <= t, plus golden-section refinement, where h = `eps_hint` (typically another
// method's epsilon at the same delta).
absl::StatusOr<RecursiveEpsilonChoice> OptimizeRecursiveEpsilon(
    const AllocConfig& config, const Delta& delta, Direction direction,
    const AddBoundFn& base_add, double eps_hint);

// ---------------------------------------------------------------------------
// Gaussian corollary for k >= 1 in its asymptotic regime.

// sigma > 8 max{sqrt(ln(t/delta)), sqrt(k/t) ln(t/delta)}.
bool GaussCorollaryRegimeHolds(double sigma, int64_t t, int64_t k,
                               double delta);

// Requires epochs = 1. Fails with kFailedPrecondition outside the regime.
absl::StatusOr<DirectionalDelta> GaussCombinedKDelta(const AllocConfig& config,
                                                     double epsilon,
                                                     const Delta& delta_slack);

absl::StatusOr<DirectionalEpsilon> GaussCombinedKEpsilon(
    const AllocConfig& config, const Delta& delta);

}  // namespace allocdp

#endif  // ALLOCDP_ALLOC_BOUNDS_H_
