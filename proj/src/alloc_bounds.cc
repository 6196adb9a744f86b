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

#include "allocdp/alloc_bounds.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "allocdp/log_math.h"
#include "allocdp/poisson_accountant.h"
#include "allocdp/status_macros.h"

namespace allocdp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

absl::Status RequireSingleAllocation(const AllocConfig& config) {
  RETURN_IF_ERROR(ValidateAllocConfig(config));
  if (config.k != 1 || config.epochs != 1) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "bound requires k = 1 and epochs = 1 (got k=%d, epochs=%d); use the "
        "accountant's block reduction",
        config.k, config.epochs));
  }
  return absl::OkStatus();
}

absl::Status RequirePositiveEpsilon(double epsilon) {
  if (!(epsilon > 0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("epsilon must be positive and finite, got %g", epsilon));
  }
  return absl::OkStatus();
}

bool WantsRemove(Direction d) { return d != Direction::kAdd; }
bool WantsAdd(Direction d) { return d != Direction::kRemove; }

absl::StatusOr<Delta> OneSided(const PoissonProfile& profile, double epsilon,
                               Direction direction) {
  ASSIGN_OR_RETURN(const RdpDelta d, profile.DeltaAt(epsilon, direction));
  return d.delta;
}

void KeepMin(std::optional<double>& best, double candidate) {
  if (!best.has_value() || candidate < *best) best = candidate;
}

// gamma_add(eps) * delta_P(eps_add(eps)) at one threshold.
absl::StatusOr<Delta> DecompositionAddRaw(const PoissonProfile& profile,
                                          const DecompositionParams& params,
                                          double epsilon) {
  ASSIGN_OR_RETURN(const Delta d, OneSided(profile, params.EpsAdd(epsilon),
                                           Direction::kAdd));
  return d.Scaled(params.GammaAdd(epsilon));
}

// The add-direction decomposition bound falls and then grows like e^eps
// (eps_add saturates while gamma_add does not). Because the true profile is
// non-increasing, the bound at the minimizer also holds at every larger eps.
struct AddMinimum {
  double epsilon;
  Delta delta;
};

constexpr double kAddScanStart = 1e-6;
constexpr double kAddScanStop = 100.0;
constexpr double kAddScanRatio = 1.25;

absl::StatusOr<AddMinimum> MinimizeDecompositionAdd(
    const PoissonProfile& profile, const DecompositionParams& params) {
  auto log_bound = [&](double eps) -> absl::StatusOr<double> {
    ASSIGN_OR_RETURN(const Delta d, DecompositionAddRaw(profile, params, eps));
    return d.log_value();
  };
  double best_eps = kAddScanStart;
  double best = kInf;
  for (double eps = kAddScanStart; eps <= kAddScanStop; eps *= kAddScanRatio) {
    ASSIGN_OR_RETURN(const double v, log_bound(eps));
    if (v < best) {
      best = v;
      best_eps = eps;
    }
  }
  // Golden-section refinement in log eps between the grid neighbours.
  double lo = std::log(best_eps / kAddScanRatio);
  double hi = std::log(best_eps * kAddScanRatio);
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - ratio * (hi - lo);
  double x2 = lo + ratio * (hi - lo);
  ASSIGN_OR_RETURN(double f1, log_bound(std::exp(x1)));
  ASSIGN_OR_RETURN(double f2, log_bound(std::exp(x2)));
  for (int i = 0; i < 30; ++i) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - ratio * (hi - lo);
      ASSIGN_OR_RETURN(f1, log_bound(std::exp(x1)));
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (hi - lo);
      ASSIGN_OR_RETURN(f2, log_bound(std::exp(x2)));
    }
  }
  const double x = f1 <= f2 ? x1 : x2;
  if (std::min(f1, f2) < best) best_eps = std::exp(x);
  ASSIGN_OR_RETURN(const Delta at_best,
                   DecompositionAddRaw(profile, params, best_eps));
  return AddMinimum{best_eps, at_best};
}

}  // namespace

Delta DirectionalDelta::Combined() const {
  Delta out = Delta::Zero();
  if (remove.has_value()) out = Max(out, *remove);
  if (add.has_value()) out = Max(out, *add);
  return out;
}

double DirectionalEpsilon::Combined() const {
  double out = -kInf;
  if (remove.has_value()) out = std::max(out, *remove);
  if (add.has_value()) out = std::max(out, *add);
  return out;
}

// ---------------------------------------------------------------------------
// Decomposition.

absl::StatusOr<DecompositionParams> DecompositionParams::Create(int64_t t,
                                                                double lambda) {
  if (t < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("t must be >= 1, got %d", t));
  }
  if (!(lambda > 0) || lambda > 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("lambda must lie in (0, 1], got %g", lambda));
  }
  // 1 - (1 - lambda)^t = -expm1(t log1p(-lambda)).
  const double hit = lambda == 1.0
                         ? 1.0
                         : -std::expm1(static_cast<double>(t) *
                                       std::log1p(-lambda));
  return DecompositionParams{lambda, 1.0 / hit};
}

double DecompositionParams::GammaAdd(double epsilon) const {
  return 1.0 + std::exp(epsilon) * (gamma_remove - 1.0);
}

double DecompositionParams::EpsRemove(double epsilon) const {
  return std::log1p(std::expm1(epsilon) / gamma_remove);
}

double DecompositionParams::EpsAdd(double epsilon) const {
  return -std::log1p(std::expm1(-epsilon) / gamma_remove);
}

double DecompositionParams::EpsilonFromEpsRemove(double eps_remove) const {
  return std::log1p(gamma_remove * std::expm1(eps_remove));
}

absl::StatusOr<DirectionalDelta> DecompositionDelta(
    const AllocConfig& config, double epsilon, std::optional<double> lambda) {
  RETURN_IF_ERROR(RequireSingleAllocation(config));
  RETURN_IF_ERROR(RequirePositiveEpsilon(epsilon));
  const double rate = lambda.value_or(1.0 / static_cast<double>(config.t));
  ASSIGN_OR_RETURN(const DecompositionParams params,
                   DecompositionParams::Create(config.t, rate));
  ASSIGN_OR_RETURN(const PoissonProfile profile,
                   PoissonProfile::Create(config.sigma, rate, config.t,
                                          config.direction));
  DirectionalDelta out;
  if (WantsRemove(config.direction)) {
    ASSIGN_OR_RETURN(const Delta d, OneSided(profile, params.EpsRemove(epsilon),
                                             Direction::kRemove));
    out.remove = d.Scaled(params.gamma_remove);
  }
  if (WantsAdd(config.direction)) {
    ASSIGN_OR_RETURN(const AddMinimum minimum,
                     MinimizeDecompositionAdd(profile, params));
    ASSIGN_OR_RETURN(
        out.add,
        DecompositionAddRaw(profile, params, std::min(epsilon, minimum.epsilon)));
  }
  return out;
}

absl::StatusOr<DirectionalEpsilon> DecompositionEpsilon(
    const AllocConfig& config, const Delta& delta,
    std::optional<double> lambda) {
  RETURN_IF_ERROR(RequireSingleAllocation(config));
  const double rate = lambda.value_or(1.0 / static_cast<double>(config.t));
  ASSIGN_OR_RETURN(const DecompositionParams params,
                   DecompositionParams::Create(config.t, rate));
  ASSIGN_OR_RETURN(const PoissonProfile profile,
                   PoissonProfile::Create(config.sigma, rate, config.t,
                                          config.direction));
  DirectionalEpsilon out;
  if (WantsRemove(config.direction)) {
    // gamma * delta_P(eps_remove) <= delta inverts in closed form.
    ASSIGN_OR_RETURN(const Delta scaled,
                     Delta::FromLog(delta.log_value() -
                                    std::log(params.gamma_remove)));
    ASSIGN_OR_RETURN(const RdpEpsilon e,
                     profile.EpsilonAt(scaled, Direction::kRemove));
    out.remove = params.EpsilonFromEpsRemove(std::max(e.epsilon, 0.0));
  }
  if (WantsAdd(config.direction)) {
    ASSIGN_OR_RETURN(const AddMinimum minimum,
                     MinimizeDecompositionAdd(profile, params));
    if (delta < minimum.delta) {
      return absl::OutOfRangeError(absl::StrFormat(
          "target unattainable: add-direction decomposition bound bottoms out "
          "at %g > %g",
          minimum.delta.value(), delta.value()));
    }
    DeltaFunction fn = [&](double eps) {
      return DecompositionAddRaw(profile, params, eps);
    };
    ASSIGN_OR_RETURN(out.add, InvertDeltaFn(fn, delta,
                                            Bracket{kAddScanStart,
                                                    minimum.epsilon}));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Truncated Poisson.

absl::StatusOr<TruncatedPoissonParams> MakeTruncatedPoissonParams(
    double eps0, double delta0, double delta_prime, int64_t t) {
  if (t < 2) {
    return absl::InvalidArgumentError(
        absl::StrFormat("truncated Poisson bound needs t >= 2, got %d", t));
  }
  if (!(eps0 >= 0) || !std::isfinite(eps0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("eps0 must be non-negative and finite, got %g", eps0));
  }
  if (!(delta_prime > 0 && delta_prime < 1) || !(delta0 >= 0 && delta0 < 1)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "need delta' in (0, 1) and delta0 in [0, 1), got %g and %g",
        delta_prime, delta0));
  }
  const double td = static_cast<double>(t);
  const double ceiling = 1.0 - 1.0 / td;
  const double raw =
      std::cosh(eps0) * std::sqrt(2.0 / td * -std::log(delta_prime));
  TruncatedPoissonParams p;
  p.eps0 = eps0;
  p.delta0 = delta0;
  p.delta_prime = delta_prime;
  p.cap_active = !(raw < ceiling);
  p.gamma = p.cap_active ? ceiling : raw;
  p.eta = p.cap_active ? 1.0 : std::min(1.0, 1.0 / (td * (1.0 - p.gamma)));
  return p;
}

absl::StatusOr<TruncatedPoissonParams> GaussianTruncatedPoissonParams(
    double sigma, double delta0, double delta_prime, int64_t t) {
  ASSIGN_OR_RETURN(const Delta d0, Delta::FromValue(delta0));
  ASSIGN_OR_RETURN(const double eps0, GaussianEpsilon(sigma, d0));
  // A randomizer that is (0, delta0)-DP is (eps, delta0)-DP for every eps > 0;
  // cosh is continuous at 0, so the limit is used.
  return MakeTruncatedPoissonParams(std::max(eps0, 0.0), delta0, delta_prime,
                                    t);
}

absl::StatusOr<TruncatedPoissonResult> TruncatedPoissonDelta(
    const AllocConfig& config, double epsilon, const Delta& slack_budget) {
  RETURN_IF_ERROR(RequireSingleAllocation(config));
  RETURN_IF_ERROR(RequirePositiveEpsilon(epsilon));
  if (!(slack_budget.value() > 0 && slack_budget.value() < 1)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "slack budget must lie in (0, 1), got %g", slack_budget.value()));
  }
  const double td = static_cast<double>(config.t);
  TruncatedPoissonResult out;
  absl::Status last_error = absl::OkStatus();
  for (double share : kSlackSplits) {
    const double delta0 = share * slack_budget.value() / td;
    const double delta_prime = (1.0 - share) * slack_budget.value();
    auto params = GaussianTruncatedPoissonParams(config.sigma, delta0,
                                                 delta_prime, config.t);
    if (!params.ok()) {
      last_error = params.status();
      continue;
    }
    ASSIGN_OR_RETURN(const PoissonProfile profile,
                     PoissonProfile::Create(config.sigma, params->eta, config.t,
                                            config.direction));
    if (WantsRemove(config.direction)) {
      ASSIGN_OR_RETURN(const Delta d,
                       OneSided(profile, epsilon, Direction::kRemove));
      const Delta total = d + slack_budget;
      if (!out.delta.remove.has_value() || total < *out.delta.remove) {
        out.delta.remove = total;
        out.remove_params = *params;
      }
    }
    if (WantsAdd(config.direction)) {
      ASSIGN_OR_RETURN(const Delta d,
                       OneSided(profile, epsilon, Direction::kAdd));
      const Delta total = d + slack_budget;
      if (!out.delta.add.has_value() || total < *out.delta.add) {
        out.delta.add = total;
        out.add_params = *params;
      }
    }
  }
  if (!out.remove_params.has_value() && !out.add_params.has_value()) {
    return last_error;
  }
  out.cap_active = (out.remove_params && out.remove_params->cap_active) ||
                   (out.add_params && out.add_params->cap_active);
  return out;
}

absl::StatusOr<TruncatedPoissonEpsilonResult> TruncatedPoissonEpsilon(
    const AllocConfig& config, const Delta& delta) {
  RETURN_IF_ERROR(RequireSingleAllocation(config));
  const double td = static_cast<double>(config.t);
  TruncatedPoissonEpsilonResult out;
  bool remove_cap = false;
  bool add_cap = false;
  absl::Status last_error = absl::OkStatus();
  for (double fraction : kSlackFractions) {
    const double slack = fraction * delta.value();
    ASSIGN_OR_RETURN(const Delta poisson_target,
                     Delta::FromLog(delta.log_value() + std::log1p(-fraction)));
    for (double share : kSlackSplits) {
      auto params = GaussianTruncatedPoissonParams(
          config.sigma, share * slack / td, (1.0 - share) * slack, config.t);
      if (!params.ok()) {
        last_error = params.status();
        continue;
      }
      ASSIGN_OR_RETURN(const PoissonProfile profile,
                       PoissonProfile::Create(config.sigma, params->eta,
                                              config.t, config.direction));
      if (WantsRemove(config.direction)) {
        ASSIGN_OR_RETURN(const RdpEpsilon e,
                         profile.EpsilonAt(poisson_target, Direction::kRemove));
        if (!out.epsilon.remove.has_value() || e.epsilon < *out.epsilon.remove) {
          out.epsilon.remove = e.epsilon;
          remove_cap = params->cap_active;
        }
      }
      if (WantsAdd(config.direction)) {
        ASSIGN_OR_RETURN(const RdpEpsilon e,
                         profile.EpsilonAt(poisson_target, Direction::kAdd));
        if (!out.epsilon.add.has_value() || e.epsilon < *out.epsilon.add) {
          out.epsilon.add = e.epsilon;
          add_cap = params->cap_active;
        }
      }
    }
  }
  if (!out.epsilon.remove.has_value() && !out.epsilon.add.has_value()) {
    return last_error;
  }
  out.cap_active = remove_cap || add_cap;
  return out;
}

// ---------------------------------------------------------------------------
// Recursive.

absl::StatusOr<RecursiveParams> RecursiveParams::Create(double eps_prime,
                                                        int64_t t) {
  if (!(eps_prime > 0) || !std::isfinite(eps_prime)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "eps' must be positive and finite, got %g", eps_prime));
  }
  const double eta = std::exp(2.0 * eps_prime) / static_cast<double>(t);
  if (eta > 1.0) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "eta = exp(2 eps')/t = %g exceeds 1 (eps'=%g, t=%d)", eta, eps_prime,
        t));
  }
  const double tau = 1.0 / (std::exp(eps_prime) * std::expm1(eps_prime));
  return RecursiveParams{eps_prime, eta, tau};
}

namespace {

absl::StatusOr<Delta> RecursiveOneSided(const AllocConfig& config,
                                        double epsilon,
                                        const RecursiveParams& params,
                                        Direction direction,
                                        const AddBoundFn& base_add) {
  ASSIGN_OR_RETURN(const PoissonProfile profile,
                   PoissonProfile::Create(config.sigma, params.eta, config.t,
                                          direction));
  ASSIGN_OR_RETURN(const Delta poisson, OneSided(profile, epsilon, direction));
  ASSIGN_OR_RETURN(const Delta base, base_add(params.eps_prime));
  double factor = params.tau;
  if (direction == Direction::kAdd) factor *= std::exp(2.0 * params.eps_prime);
  return poisson + base.Scaled(factor);
}

}  // namespace

absl::StatusOr<DirectionalDelta> RecursiveDelta(const AllocConfig& config,
                                                double epsilon,
                                                double eps_prime,
                                                const AddBoundFn& base_add) {
  RETURN_IF_ERROR(RequireSingleAllocation(config));
  RETURN_IF_ERROR(RequirePositiveEpsilon(epsilon));
  ASSIGN_OR_RETURN(const RecursiveParams params,
                   RecursiveParams::Create(eps_prime, config.t));
  DirectionalDelta out;
  if (WantsRemove(config.direction)) {
    ASSIGN_OR_RETURN(out.remove, RecursiveOneSided(config, epsilon, params,
                                                   Direction::kRemove,
                                                   base_add));
  }
  if (WantsAdd(config.direction)) {
    ASSIGN_OR_RETURN(out.add, RecursiveOneSided(config, epsilon, params,
                                                Direction::kAdd, base_add));
  }
  return out;
}

namespace {

constexpr int kGoldenIterations = 40;
// Smallest eps' on the fixed lattice; below it tau * base is never useful.
constexpr double kMinEpsPrime = 1e-3;

// Minimizes `objective` (lower is better) over eps' in (0, ln(t)/2]. The grid
// is the doubling sequence from `start` merged with a fixed lattice of
// half powers of two, so nearby queries share candidates and the optimum
// moves monotonically with epsilon. A golden-section search in log eps'
// between the grid neighbours of the best point refines it. Returns nullopt
// if no grid point is feasible.
struct EpsPrimeSearch {
  double eps_prime = 0.0;
  double value = kInf;
  bool boundary_hit = false;
};

absl::StatusOr<std::optional<EpsPrimeSearch>> SearchEpsPrime(
    double start, int64_t t,
    const std::function<absl::StatusOr<double>(double)>& objective) {
  // Pulled in slightly so exp(2 eps')/t stays <= 1 after rounding.
  const double cap = 0.5 * std::log(static_cast<double>(t)) * (1 - 1e-12);
  std::vector<double> grid;
  for (double e = start; e <= cap && grid.size() < 64; e *= 2.0) {
    grid.push_back(e);
  }
  if (grid.empty()) return std::nullopt;
  for (double e = cap; e >= kMinEpsPrime; e /= std::sqrt(2.0)) {
    grid.push_back(e);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end(),
                         [](double x, double y) { return y <= x * (1 + 1e-12); }),
             grid.end());
  EpsPrimeSearch best;
  size_t best_index = 0;
  for (size_t i = 0; i < grid.size(); ++i) {
    ASSIGN_OR_RETURN(const double v, objective(grid[i]));
    if (v < best.value) {
      best.value = v;
      best.eps_prime = grid[i];
      best_index = i;
    }
  }
  best.boundary_hit = best_index == 0 || best_index + 1 == grid.size();
  if (!std::isfinite(best.value)) return best;

  double lo = std::log(grid[best_index == 0 ? 0 : best_index - 1]);
  double hi = std::log(grid[std::min(best_index + 1, grid.size() - 1)]);
  if (!(hi > lo)) return best;
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - ratio * (hi - lo);
  double x2 = lo + ratio * (hi - lo);
  ASSIGN_OR_RETURN(double f1, objective(std::exp(x1)));
  ASSIGN_OR_RETURN(double f2, objective(std::exp(x2)));
  auto consider = [&](double x, double f) {
    if (f < best.value) {
      best.value = f;
      best.eps_prime = std::exp(x);
    }
  };
  consider(x1, f1);
  consider(x2, f2);
  for (int i = 0; i < kGoldenIterations; ++i) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - ratio * (hi - lo);
      ASSIGN_OR_RETURN(f1, objective(std::exp(x1)));
      consider(x1, f1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (hi - lo);
      ASSIGN_OR_RETURN(f2, objective(std::exp(x2)));
      consider(x2, f2);
    }
  }
  return best;
}

absl::Status RequireOneSided(Direction direction) {
  if (direction == Direction::kBoth) {
    return absl::InvalidArgumentError("direction must be remove or add");
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<EpsPrimeChoice> OptimizeEpsPrime(const AllocConfig& config,
                                                double epsilon,
                                                Direction direction,
                                                const AddBoundFn& base_add) {
  RETURN_IF_ERROR(RequireSingleAllocation(config));
  RETURN_IF_ERROR(RequirePositiveEpsilon(epsilon));
  RETURN_IF_ERROR(RequireOneSided(direction));
  auto objective = [&](double eps_prime) -> absl::StatusOr<double> {
    ASSIGN_OR_RETURN(const RecursiveParams params,
                     RecursiveParams::Create(eps_prime, config.t));
    ASSIGN_OR_RETURN(const Delta d, RecursiveOneSided(config, epsilon, params,
                                                      direction, base_add));
    return d.log_value();
  };
  ASSIGN_OR_RETURN(const std::optional<EpsPrimeSearch> search,
                   SearchEpsPrime(2.0 * epsilon, config.t, objective));
  EpsPrimeChoice choice;
  if (!search.has_value()) {
    choice.fallback = true;
    if (direction == Direction::kAdd) {
      ASSIGN_OR_RETURN(choice.delta, base_add(epsilon));
    }
    return choice;
  }
  choice.eps_prime = search->eps_prime;
  choice.boundary_hit = search->boundary_hit;
  ASSIGN_OR_RETURN(choice.delta, Delta::FromLog(std::min(search->value, 0.0)));
  return choice;
}

absl::StatusOr<RecursiveEpsilonChoice> OptimizeRecursiveEpsilon(
    const AllocConfig& config, const Delta& delta, Direction direction,
    const AddBoundFn& base_add, double eps_hint) {
  RETURN_IF_ERROR(RequireSingleAllocation(config));
  RETURN_IF_ERROR(RequireOneSided(direction));
  RETURN_IF_ERROR(RequirePositiveEpsilon(eps_hint));
  // For fixed eps' the base term is a constant, so the Poisson part inverts
  // in closed form at the leftover budget.
  auto objective = [&](double eps_prime) -> absl::StatusOr<double> {
    ASSIGN_OR_RETURN(const RecursiveParams params,
                     RecursiveParams::Create(eps_prime, config.t));
    ASSIGN_OR_RETURN(const Delta base, base_add(eps_prime));
    double factor = params.tau;
    if (direction == Direction::kAdd) factor *= std::exp(2.0 * eps_prime);
    const double log_spent = base.log_value() + std::log(factor);
    if (log_spent >= delta.log_value()) return kInf;
    ASSIGN_OR_RETURN(const Delta left,
                     Delta::FromLog(delta.log_value() +
                                    Log1mExp(log_spent - delta.log_value())));
    ASSIGN_OR_RETURN(const PoissonProfile profile,
                     PoissonProfile::Create(config.sigma, params.eta, config.t,
                                            direction));
    ASSIGN_OR_RETURN(const RdpEpsilon e, profile.EpsilonAt(left, direction));
    return e.epsilon;
  };
  ASSIGN_OR_RETURN(const std::optional<EpsPrimeSearch> search,
                   SearchEpsPrime(2.0 * eps_hint, config.t, objective));
  RecursiveEpsilonChoice choice;
  if (!search.has_value()) {
    choice.fallback = true;
    return choice;
  }
  choice.eps_prime = search->eps_prime;
  choice.boundary_hit = search->boundary_hit;
  if (std::isfinite(search->value)) choice.epsilon = search->value;
  return choice;
}

// ---------------------------------------------------------------------------
// Gaussian corollary.

bool GaussCorollaryRegimeHolds(double sigma, int64_t t, int64_t k,
                               double delta) {
  if (!(delta > 0 && delta < 1) || t < 1 || k < 1) return false;
  const double log_ratio = std::log(static_cast<double>(t) / delta);
  const double ratio = static_cast<double>(k) / static_cast<double>(t);
  const double need =
      8.0 * std::max(std::sqrt(log_ratio), std::sqrt(ratio) * log_ratio);
  return sigma > need;
}

absl::StatusOr<DirectionalDelta> GaussCombinedKDelta(const AllocConfig& config,
                                                     double epsilon,
                                                     const Delta& delta_slack) {
  RETURN_IF_ERROR(ValidateAllocConfig(config));
  RETURN_IF_ERROR(RequirePositiveEpsilon(epsilon));
  if (config.epochs != 1) {
    return absl::InvalidArgumentError("Gaussian corollary requires epochs = 1");
  }
  if (!GaussCorollaryRegimeHolds(config.sigma, config.t, config.k,
                                 delta_slack.value())) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "outside corollary regime: sigma=%g, t=%d, k=%d, delta=%g",
        config.sigma, config.t, config.k, delta_slack.value()));
  }
  const double rate =
      std::min(1.0, 2.0 * static_cast<double>(config.k) /
                        static_cast<double>(config.t));
  ASSIGN_OR_RETURN(const PoissonProfile profile,
                   PoissonProfile::Create(config.sigma, rate, config.t,
                                          config.direction));
  const Delta slack = delta_slack.Scaled(2.0);
  DirectionalDelta out;
  if (WantsRemove(config.direction)) {
    ASSIGN_OR_RETURN(const Delta d,
                     OneSided(profile, epsilon, Direction::kRemove));
    out.remove = d + slack;
  }
  if (WantsAdd(config.direction)) {
    ASSIGN_OR_RETURN(const Delta d, OneSided(profile, epsilon, Direction::kAdd));
    out.add = d + slack;
  }
  return out;
}

absl::StatusOr<DirectionalEpsilon> GaussCombinedKEpsilon(
    const AllocConfig& config, const Delta& delta) {
  RETURN_IF_ERROR(ValidateAllocConfig(config));
  if (config.epochs != 1) {
    return absl::InvalidArgumentError("Gaussian corollary requires epochs = 1");
  }
  const double rate =
      std::min(1.0, 2.0 * static_cast<double>(config.k) /
                        static_cast<double>(config.t));
  std::optional<PoissonProfile> profile;
  DirectionalEpsilon out;
  for (double fraction : kSlackFractions) {
    // 2 delta_s = fraction * delta.
    const double delta_slack = 0.5 * fraction * delta.value();
    if (!GaussCorollaryRegimeHolds(config.sigma, config.t, config.k,
                                   delta_slack)) {
      continue;
    }
    if (!profile.has_value()) {
      ASSIGN_OR_RETURN(profile, PoissonProfile::Create(config.sigma, rate,
                                                       config.t,
                                                       config.direction));
    }
    ASSIGN_OR_RETURN(const Delta target,
                     Delta::FromLog(delta.log_value() + std::log1p(-fraction)));
    if (WantsRemove(config.direction)) {
      ASSIGN_OR_RETURN(const RdpEpsilon e,
                       profile->EpsilonAt(target, Direction::kRemove));
      KeepMin(out.remove, e.epsilon);
    }
    if (WantsAdd(config.direction)) {
      ASSIGN_OR_RETURN(const RdpEpsilon e,
                       profile->EpsilonAt(target, Direction::kAdd));
      KeepMin(out.add, e.epsilon);
    }
  }
  if (!out.remove.has_value() && !out.add.has_value()) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "outside corollary regime for every slack split: sigma=%g, t=%d, k=%d",
        config.sigma, config.t, config.k));
  }
  return out;
}

}  // namespace allocdp
