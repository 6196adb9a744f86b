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

#include "allocdp/accountant.h"

#include <algorithm>
#include <cmath>
#include <memory>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "allocdp/alloc_bounds.h"
#include "allocdp/alloc_rdp.h"
#include "allocdp/poisson_accountant.h"
#include "allocdp/status_macros.h"

namespace allocdp {
namespace {

bool WantsRemove(Direction d) { return d != Direction::kAdd; }
bool WantsAdd(Direction d) { return d != Direction::kRemove; }

// Inputs shared by every method evaluation of one query.
struct Query {
  bool solve_epsilon;
  Delta delta = Delta::Zero();
  double epsilon = 0.0;
};

double ClampEpsilon(double epsilon) { return std::max(epsilon, 0.0); }

void SetSide(MethodOutcome& out, Direction side, double value) {
  (side == Direction::kRemove ? out.remove : out.add) = value;
}

// Upper bound on the add profile of one allocation: the smaller of the
// decomposition and direct add bounds. The decomposition profile is built
// on first use.
AddBoundFn MakeBaseAdd(const AllocConfig& config) {
  auto profile = std::make_shared<std::optional<PoissonProfile>>();
  const double lambda = 1.0 / static_cast<double>(config.t);
  return [config, profile, lambda](double epsilon) -> absl::StatusOr<Delta> {
    ASSIGN_OR_RETURN(const Delta direct,
                     AllocAddDeltaGauss(config.sigma, config.t, epsilon));
    ASSIGN_OR_RETURN(const DecompositionParams params,
                     DecompositionParams::Create(config.t, lambda));
    if (!profile->has_value()) {
      ASSIGN_OR_RETURN(*profile,
                       PoissonProfile::Create(config.sigma, lambda, config.t,
                                              Direction::kAdd));
    }
    ASSIGN_OR_RETURN(const RdpDelta d,
                     (*profile)->DeltaAt(params.EpsAdd(epsilon),
                                         Direction::kAdd));
    return Min(direct, d.delta.Scaled(params.GammaAdd(epsilon)));
  };
}

// ---------------------------------------------------------------------------
// Single allocation (k = 1, epochs = 1).

absl::Status RunDecomposition(const AllocConfig& config, const Query& q,
                              MethodOutcome& out) {
  if (q.solve_epsilon) {
    ASSIGN_OR_RETURN(const DirectionalEpsilon e,
                     DecompositionEpsilon(config, q.delta));
    if (e.remove) out.remove = ClampEpsilon(*e.remove);
    if (e.add) out.add = ClampEpsilon(*e.add);
  } else {
    ASSIGN_OR_RETURN(const DirectionalDelta d,
                     DecompositionDelta(config, q.epsilon));
    if (d.remove) out.remove = d.remove->value();
    if (d.add) out.add = d.add->value();
  }
  return absl::OkStatus();
}

absl::Status RunTruncatedPoisson(const AllocConfig& config, const Query& q,
                                 MethodOutcome& out) {
  bool cap_active = false;
  if (q.solve_epsilon) {
    ASSIGN_OR_RETURN(const TruncatedPoissonEpsilonResult r,
                     TruncatedPoissonEpsilon(config, q.delta));
    if (r.epsilon.remove) out.remove = ClampEpsilon(*r.epsilon.remove);
    if (r.epsilon.add) out.add = ClampEpsilon(*r.epsilon.add);
    cap_active = r.cap_active;
  } else {
    std::optional<Delta> remove;
    std::optional<Delta> add;
    bool remove_cap = false;
    bool add_cap = false;
    absl::Status last = absl::OkStatus();
    for (double slack : kTruncatedSlackGrid) {
      ASSIGN_OR_RETURN(const Delta budget, Delta::FromValue(slack));
      auto r = TruncatedPoissonDelta(config, q.epsilon, budget);
      if (!r.ok()) {
        last = r.status();
        continue;
      }
      if (r->delta.remove && (!remove || *r->delta.remove < *remove)) {
        remove = r->delta.remove;
        remove_cap = r->remove_params && r->remove_params->cap_active;
      }
      if (r->delta.add && (!add || *r->delta.add < *add)) {
        add = r->delta.add;
        add_cap = r->add_params && r->add_params->cap_active;
      }
    }
    if (!remove && !add) return last;
    if (remove) out.remove = remove->value();
    if (add) out.add = add->value();
    cap_active = remove_cap || add_cap;
  }
  if (cap_active) out.flags.push_back("cap_active");
  return absl::OkStatus();
}

absl::Status RunRecursive(const AllocConfig& config, const Query& q,
                          const MethodOutcome* decomposition,
                          const MethodOutcome* direct, MethodOutcome& out) {
  const AddBoundFn base_add = MakeBaseAdd(config);
  bool fallback = false;
  bool boundary = false;
  bool base_wins = false;
  std::vector<std::string> reasons;
  for (Direction side : {Direction::kRemove, Direction::kAdd}) {
    if (side == Direction::kRemove ? !WantsRemove(config.direction)
                                   : !WantsAdd(config.direction)) {
      continue;
    }
    if (q.solve_epsilon) {
      // Start the eps' grid from another method's epsilon at this delta.
      std::optional<double> hint;
      for (const MethodOutcome* m : {decomposition, direct}) {
        if (m == nullptr) continue;
        const std::optional<double>& v =
            side == Direction::kRemove ? m->remove : m->add;
        if (v && *v > 0 && (!hint || *v < *hint)) hint = *v;
      }
      if (!hint) {
        ASSIGN_OR_RETURN(const double local,
                         GaussianEpsilon(config.sigma, q.delta));
        hint = std::max(local, 1e-3) /
               std::sqrt(static_cast<double>(config.t));
      }
      ASSIGN_OR_RETURN(const RecursiveEpsilonChoice choice,
                       OptimizeRecursiveEpsilon(config, q.delta, side,
                                                base_add, *hint));
      fallback |= choice.fallback;
      boundary |= choice.boundary_hit;
      std::optional<double> eps = choice.epsilon;
      // The base add bound is itself a valid add bound, so never report worse.
      if (side == Direction::kAdd) {
        ASSIGN_OR_RETURN(const double e,
                         InvertDeltaFnExpanding(base_add, q.delta));
        if (!eps || e < *eps) {
          base_wins |= !choice.fallback;
          eps = e;
        }
      }
      if (eps) {
        SetSide(out, side, ClampEpsilon(*eps));
      } else {
        reasons.push_back(absl::StrFormat("%s: no feasible eps'",
                                          std::string(DirectionName(side))));
      }
    } else {
      ASSIGN_OR_RETURN(const EpsPrimeChoice choice,
                       OptimizeEpsPrime(config, q.epsilon, side, base_add));
      fallback |= choice.fallback;
      boundary |= choice.boundary_hit;
      std::optional<Delta> delta = choice.delta;
      if (side == Direction::kAdd && !choice.fallback) {
        ASSIGN_OR_RETURN(const Delta base, base_add(q.epsilon));
        if (!delta || base < *delta) {
          base_wins = true;
          delta = base;
        }
      }
      if (delta) {
        SetSide(out, side, delta->value());
      } else {
        reasons.push_back(absl::StrFormat("%s: no feasible eps'",
                                          std::string(DirectionName(side))));
      }
    }
  }
  if (fallback) out.flags.push_back("eps_prime_fallback");
  if (boundary) out.flags.push_back("eps_prime_boundary");
  if (base_wins) out.flags.push_back("base_add_tighter");
  if (!out.remove && !out.add) {
    return absl::FailedPreconditionError(absl::StrJoin(reasons, "; "));
  }
  if (!reasons.empty()) out.error = absl::StrJoin(reasons, "; ");
  return absl::OkStatus();
}

// ---------------------------------------------------------------------------
// Any block structure.

absl::Status RunDirectRdp(const AllocConfig& config, const Query& q,
                          int max_alpha, MethodOutcome& out) {
  bool approximate = false;
  int best_alpha = 0;
  if (q.solve_epsilon) {
    ASSIGN_OR_RETURN(const AllocRdpEpsilonResult r,
                     AllocRdpEpsilon(config, q.delta, max_alpha));
    if (r.remove) out.remove = ClampEpsilon(*r.remove);
    if (r.add) out.add = ClampEpsilon(*r.add);
    approximate = r.add_approximate;
    best_alpha = r.remove_best_alpha;
  } else {
    ASSIGN_OR_RETURN(const AllocRdpDeltaResult r,
                     AllocRdpDelta(config, q.epsilon, max_alpha));
    if (r.remove) out.remove = r.remove->value();
    if (r.add) out.add = r.add->value();
    approximate = r.add_approximate;
    best_alpha = r.remove_best_alpha;
  }
  if (best_alpha > 0) {
    out.flags.push_back(absl::StrFormat("best_alpha=%d", best_alpha));
  }
  if (approximate) out.flags.push_back("add_approximate");
  return absl::OkStatus();
}

absl::Status RunGaussCorollary(const AllocConfig& config, const Query& q,
                               MethodOutcome& out) {
  out.flags.push_back("gaussian_corollary");
  if (q.solve_epsilon) {
    ASSIGN_OR_RETURN(const DirectionalEpsilon e,
                     GaussCombinedKEpsilon(config, q.delta));
    if (e.remove) out.remove = ClampEpsilon(*e.remove);
    if (e.add) out.add = ClampEpsilon(*e.add);
    return absl::OkStatus();
  }
  std::optional<Delta> remove;
  std::optional<Delta> add;
  absl::Status last = absl::OkStatus();
  for (double slack : kTruncatedSlackGrid) {
    ASSIGN_OR_RETURN(const Delta s, Delta::FromValue(0.5 * slack));
    auto d = GaussCombinedKDelta(config, q.epsilon, s);
    if (!d.ok()) {
      last = d.status();
      continue;
    }
    if (d->remove && (!remove || *d->remove < *remove)) remove = d->remove;
    if (d->add && (!add || *d->add < *add)) add = d->add;
  }
  if (!remove && !add) return last;
  if (remove) out.remove = remove->value();
  if (add) out.add = add->value();
  return absl::OkStatus();
}

// ---------------------------------------------------------------------------
// Baselines.

absl::StatusOr<std::pair<std::optional<double>, std::optional<double>>>
PoissonSides(double sigma, double lambda, int64_t compositions,
             Direction direction, int max_alpha, const Query& q) {
  ASSIGN_OR_RETURN(const PoissonProfile profile,
                   PoissonProfile::Create(sigma, lambda, compositions,
                                          direction, max_alpha));
  std::optional<double> remove;
  std::optional<double> add;
  for (Direction side : {Direction::kRemove, Direction::kAdd}) {
    if (side == Direction::kRemove ? !WantsRemove(direction)
                                   : !WantsAdd(direction)) {
      continue;
    }
    double value;
    if (q.solve_epsilon) {
      ASSIGN_OR_RETURN(const RdpEpsilon e, profile.EpsilonAt(q.delta, side));
      value = ClampEpsilon(e.epsilon);
    } else {
      ASSIGN_OR_RETURN(const RdpDelta d, profile.DeltaAt(q.epsilon, side));
      value = d.delta.value();
    }
    (side == Direction::kRemove ? remove : add) = value;
  }
  return std::make_pair(remove, add);
}

absl::StatusOr<double> LocalValue(double sigma, int64_t compositions,
                                  const Query& q) {
  const double sigma_eff =
      sigma / std::sqrt(static_cast<double>(compositions));
  if (q.solve_epsilon) {
    ASSIGN_OR_RETURN(const double e, GaussianEpsilon(sigma_eff, q.delta));
    return ClampEpsilon(e);
  }
  ASSIGN_OR_RETURN(const Delta d, GaussianDelta(sigma_eff, q.epsilon));
  return d.value();
}

double Combine(const std::optional<double>& remove,
               const std::optional<double>& add) {
  double out = 0.0;
  if (remove) out = std::max(out, *remove);
  if (add) out = std::max(out, *add);
  return out;
}

std::vector<Method> EnabledMethods(const SchemeSpec& spec) {
  if (spec.methods.empty()) {
    return std::vector<Method>(std::begin(kAllMethods), std::end(kAllMethods));
  }
  // Canonical order, duplicates dropped.
  std::vector<Method> out;
  for (Method m : kAllMethods) {
    if (std::find(spec.methods.begin(), spec.methods.end(), m) !=
        spec.methods.end()) {
      out.push_back(m);
    }
  }
  return out;
}

absl::Status EvaluateAllocation(const SchemeSpec& spec, const Query& q,
                                BoundResult& result) {
  ASSIGN_OR_RETURN(const BlockDecomposition blocks,
                   MultiAllocReduce(spec.t, spec.k));
  const int64_t compositions = blocks.blocks * spec.epochs;
  const AllocConfig single{spec.sigma, spec.t, 1, 1, spec.direction};
  const AllocConfig full{spec.sigma, spec.t, spec.k, spec.epochs,
                         spec.direction};
  const std::vector<Method> enabled = EnabledMethods(spec);

  std::optional<double> local;
  if (blocks.t_prime == 1) {
    ASSIGN_OR_RETURN(local, LocalValue(spec.sigma, compositions, q));
    result.diagnostics.push_back("single_step_blocks_exact_local");
  }

  // Evaluate in dependency order (recursive last, it seeds from the others)
  // and store in canonical order.
  std::vector<MethodOutcome> outcomes;
  for (Method m : enabled) outcomes.push_back(MethodOutcome{m, {}, {}, {}, {}});
  auto find = [&](Method m) -> MethodOutcome* {
    for (MethodOutcome& o : outcomes) {
      if (o.method == m) return &o;
    }
    return nullptr;
  };
  const Method order[] = {Method::kDecomposition, Method::kTruncatedPoisson,
                          Method::kDirectRdp, Method::kRecursive};
  for (Method m : order) {
    MethodOutcome* out = find(m);
    if (out == nullptr) continue;
    absl::Status status;
    if (local.has_value()) {
      if (WantsRemove(spec.direction)) out->remove = *local;
      if (WantsAdd(spec.direction)) out->add = *local;
      out->flags.push_back("exact_local");
      continue;
    }
    if (m == Method::kDirectRdp) {
      status = RunDirectRdp(full, q, spec.max_alpha, *out);
    } else if (compositions > 1) {
      if (m == Method::kTruncatedPoisson && spec.epochs == 1) {
        status = RunGaussCorollary(full, q, *out);
      } else {
        status = absl::UnimplementedError("k>1 unsupported");
      }
    } else if (m == Method::kDecomposition) {
      status = RunDecomposition(single, q, *out);
    } else if (m == Method::kTruncatedPoisson) {
      status = RunTruncatedPoisson(single, q, *out);
    } else {
      status = RunRecursive(single, q, find(Method::kDecomposition),
                            find(Method::kDirectRdp), *out);
    }
    if (!status.ok()) {
      out->remove.reset();
      out->add.reset();
      out->error = std::string(status.message());
    }
  }

  // Per-direction minimum, first method in canonical order on ties.
  std::vector<std::string> missing;
  for (Direction side : {Direction::kRemove, Direction::kAdd}) {
    if (side == Direction::kRemove ? !WantsRemove(spec.direction)
                                   : !WantsAdd(spec.direction)) {
      continue;
    }
    std::optional<double> best;
    std::optional<Method> winner;
    for (const MethodOutcome& o : outcomes) {
      const std::optional<double>& v =
          side == Direction::kRemove ? o.remove : o.add;
      if (v && (!best || *v < *best)) {
        best = v;
        winner = o.method;
      }
    }
    if (!best) {
      missing.push_back(std::string(DirectionName(side)));
      continue;
    }
    if (side == Direction::kRemove) {
      result.remove = best;
      result.remove_winner = winner;
    } else {
      result.add = best;
      result.add_winner = winner;
    }
  }
  result.methods = outcomes;
  if (!missing.empty()) {
    std::vector<std::string> reasons;
    for (const MethodOutcome& o : outcomes) {
      reasons.push_back(absl::StrFormat(
          "%s: %s", std::string(MethodName(o.method)),
          o.error.empty() ? "no value for requested direction" : o.error));
    }
    return absl::FailedPreconditionError(absl::StrFormat(
        "no bound available (%s): %s", absl::StrJoin(missing, ", "),
        absl::StrJoin(reasons, "; ")));
  }
  result.value = Combine(result.remove, result.add);
  const bool remove_attains =
      result.remove && (!result.add || *result.remove >= *result.add);
  result.winning_method =
      remove_attains ? result.remove_winner : result.add_winner;

  const double lambda = std::min(
      1.0, static_cast<double>(spec.k) / static_cast<double>(spec.t));
  auto poisson = PoissonSides(spec.sigma, lambda, spec.t * spec.epochs,
                              spec.direction, spec.max_alpha, q);
  if (poisson.ok()) {
    result.baseline_poisson_remove = poisson->first;
    result.baseline_poisson_add = poisson->second;
    result.baseline_poisson = Combine(poisson->first, poisson->second);
  } else {
    result.diagnostics.push_back(
        absl::StrFormat("baseline_poisson: %s", poisson.status().message()));
  }
  ASSIGN_OR_RETURN(result.baseline_local,
                   LocalValue(spec.sigma, spec.k * spec.epochs, q));
  return absl::OkStatus();
}

absl::StatusOr<BoundResult> Compute(const SchemeSpec& spec, const Query& q) {
  RETURN_IF_ERROR(ValidateSchemeSpec(spec));
  BoundResult result;
  result.solved_for_epsilon = q.solve_epsilon;
  result.target = q.solve_epsilon ? q.delta.value() : q.epsilon;
  result.direction = spec.direction;
  switch (spec.scheme) {
    case Scheme::kLocal: {
      ASSIGN_OR_RETURN(const double v,
                       LocalValue(spec.sigma, spec.k * spec.epochs, q));
      if (WantsRemove(spec.direction)) result.remove = v;
      if (WantsAdd(spec.direction)) result.add = v;
      result.value = v;
      return result;
    }
    case Scheme::kPoisson: {
      const double lambda = spec.lambda.value_or(
          std::min(1.0, static_cast<double>(spec.k) /
                            static_cast<double>(spec.t)));
      ASSIGN_OR_RETURN(auto sides,
                       PoissonSides(spec.sigma, lambda, spec.t * spec.epochs,
                                    spec.direction, spec.max_alpha, q));
      result.remove = sides.first;
      result.add = sides.second;
      result.value = Combine(result.remove, result.add);
      return result;
    }
    case Scheme::kAllocation:
      RETURN_IF_ERROR(EvaluateAllocation(spec, q, result));
      return result;
  }
  return absl::InternalError("unknown scheme");
}

}  // namespace

std::string_view SchemeName(Scheme scheme) {
  switch (scheme) {
    case Scheme::kLocal:
      return "local";
    case Scheme::kPoisson:
      return "poisson";
    case Scheme::kAllocation:
      return "allocation";
  }
  return "unknown";
}

absl::StatusOr<Scheme> ParseScheme(std::string_view name) {
  if (name == "local") return Scheme::kLocal;
  if (name == "poisson") return Scheme::kPoisson;
  if (name == "allocation") return Scheme::kAllocation;
  return absl::InvalidArgumentError(
      absl::StrFormat("unknown scheme '%s'", std::string(name)));
}

std::string_view MethodName(Method method) {
  switch (method) {
    case Method::kDecomposition:
      return "decomposition";
    case Method::kTruncatedPoisson:
      return "truncated_poisson";
    case Method::kRecursive:
      return "recursive";
    case Method::kDirectRdp:
      return "direct_rdp";
  }
  return "unknown";
}

absl::StatusOr<Method> ParseMethod(std::string_view name) {
  for (Method m : kAllMethods) {
    if (MethodName(m) == name) return m;
  }
  return absl::InvalidArgumentError(
      absl::StrFormat("unknown method '%s'", std::string(name)));
}

absl::Status ValidateSchemeSpec(const SchemeSpec& spec) {
  RETURN_IF_ERROR(ValidateAllocConfig(
      AllocConfig{spec.sigma, spec.t, spec.k, spec.epochs, spec.direction}));
  if (spec.lambda.has_value()) {
    if (spec.scheme != Scheme::kPoisson) {
      return absl::InvalidArgumentError("lambda applies to the Poisson scheme");
    }
    if (!(*spec.lambda >= 0 && *spec.lambda <= 1)) {
      return absl::InvalidArgumentError(
          absl::StrFormat("lambda must lie in [0, 1], got %g", *spec.lambda));
    }
  }
  if (spec.max_alpha < 2) {
    return absl::InvalidArgumentError(
        absl::StrFormat("max_alpha must be >= 2, got %d", spec.max_alpha));
  }
  return absl::OkStatus();
}

absl::StatusOr<BoundResult> ComputeEpsilon(const SchemeSpec& spec,
                                           const Delta& delta) {
  if (!(delta.value() > 0 && delta.value() < 1)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("delta must lie in (0, 1), got %g", delta.value()));
  }
  return Compute(spec, Query{true, delta, 0.0});
}

absl::StatusOr<BoundResult> ComputeDelta(const SchemeSpec& spec,
                                         double epsilon) {
  if (!(epsilon > 0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("epsilon must be positive and finite, got %g", epsilon));
  }
  return Compute(spec, Query{false, Delta::Zero(), epsilon});
}

}  // namespace allocdp
