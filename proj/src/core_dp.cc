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

#include "allocdp/core_dp.h"

#include <algorithm>
#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "allocdp/log_math.h"
#include "allocdp/status_macros.h"

namespace allocdp {
namespace {

constexpr int kMaxBisectionSteps = 400;
constexpr int kMaxBracketExpansions = 64;
constexpr double kBracketCeiling = 1e4;

absl::Status CheckSigma(double sigma) {
  if (!(sigma > 0) || !std::isfinite(sigma)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("sigma must be positive and finite, got %g", sigma));
  }
  return absl::OkStatus();
}

// ln((1 - 1/alpha)^alpha / (alpha - 1)), the order-dependent constant of the
// RDP to hockey-stick conversion.
double ConversionLogConstant(double alpha) {
  return alpha * std::log1p(-1.0 / alpha) - std::log(alpha - 1.0);
}

double EpsilonAtOrder(double rho, int alpha, double log_delta) {
  return rho + (-log_delta + ConversionLogConstant(alpha)) / (alpha - 1.0);
}

double OffsetAtOrder(int alpha, double log_delta) {
  return (-log_delta + ConversionLogConstant(alpha)) / (alpha - 1.0);
}

absl::Status CheckOpenUnitDelta(const Delta& delta) {
  if (!(delta.value() > 0 || delta.log_value() > kNegInf) ||
      delta.log_value() >= 0) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "delta must lie strictly inside (0, 1), got %g", delta.value()));
  }
  return absl::OkStatus();
}

}  // namespace

std::string_view DirectionName(Direction direction) {
  switch (direction) {
    case Direction::kRemove:
      return "remove";
    case Direction::kAdd:
      return "add";
    case Direction::kBoth:
      return "both";
  }
  return "unknown";
}

absl::StatusOr<Direction> ParseDirection(std::string_view name) {
  if (name == "remove") return Direction::kRemove;
  if (name == "add") return Direction::kAdd;
  if (name == "both") return Direction::kBoth;
  return absl::InvalidArgumentError(
      absl::StrFormat("unknown direction '%s'", std::string(name)));
}

absl::StatusOr<Delta> Delta::FromValue(double value) {
  if (std::isnan(value) || value < 0 || value > 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("delta must lie in [0, 1], got %g", value));
  }
  return Delta(value, value == 0 ? kNegInf : std::log(value));
}

absl::StatusOr<Delta> Delta::FromLog(double log_value) {
  if (std::isnan(log_value) || log_value > 0) {
    return absl::InvalidArgumentError(
        absl::StrFormat("log delta must be <= 0, got %g", log_value));
  }
  return Delta(std::exp(log_value), log_value);
}

Delta Delta::operator+(const Delta& other) const {
  const double log_sum = std::min(0.0, LogAddExp(log_value_, other.log_value_));
  return Delta(std::exp(log_sum), log_sum);
}

Delta Delta::Scaled(double factor) const {
  if (!(factor > 0) || log_value_ == kNegInf) return Zero();
  const double log_scaled = std::min(0.0, log_value_ + std::log(factor));
  return Delta(std::exp(log_scaled), log_scaled);
}

Delta Max(const Delta& a, const Delta& b) { return a < b ? b : a; }
Delta Min(const Delta& a, const Delta& b) { return b < a ? b : a; }

absl::StatusOr<RdpCurve> RdpCurve::Create(std::vector<int> orders,
                                          std::vector<double> rho) {
  if (orders.size() != rho.size()) {
    return absl::InvalidArgumentError("orders and rho differ in length");
  }
  for (size_t i = 0; i < orders.size(); ++i) {
    if (orders[i] < 2 || (i > 0 && orders[i] <= orders[i - 1])) {
      return absl::InvalidArgumentError(
          "RDP orders must be integers >= 2 in strictly increasing order");
    }
    if (!std::isfinite(rho[i]) || rho[i] < 0) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "rho(%d) must be finite and non-negative, got %g", orders[i], rho[i]));
    }
    if (i > 0 && rho[i] < rho[i - 1]) {
      // Round-off from quadrature may dip by a few ulps; anything larger is a
      // genuine monotonicity violation.
      if (rho[i - 1] - rho[i] > 1e-9 * std::max(1.0, rho[i - 1])) {
        return absl::InvalidArgumentError(absl::StrFormat(
            "rho must be non-decreasing in alpha: rho(%d)=%g < rho(%d)=%g",
            orders[i], rho[i], orders[i - 1], rho[i - 1]));
      }
      rho[i] = rho[i - 1];
    }
  }
  return RdpCurve(std::move(orders), std::move(rho));
}

std::optional<double> RdpCurve::At(int alpha) const {
  auto it = std::lower_bound(orders_.begin(), orders_.end(), alpha);
  if (it == orders_.end() || *it != alpha) return std::nullopt;
  return rho_[it - orders_.begin()];
}

RdpCurve RdpCurve::Composed(double count) const {
  std::vector<double> rho = rho_;
  for (double& r : rho) r *= count;
  return RdpCurve(orders_, std::move(rho));
}

absl::StatusOr<Delta> GaussianDelta(double sigma, double epsilon) {
  RETURN_IF_ERROR(CheckSigma(sigma));
  if (std::isnan(epsilon)) {
    return absl::InvalidArgumentError("epsilon is NaN");
  }
  if (epsilon == std::numeric_limits<double>::infinity()) return Delta::Zero();
  if (epsilon == -std::numeric_limits<double>::infinity()) return Delta::One();
  const double upper = 1.0 / (2.0 * sigma) - epsilon * sigma;
  const double lower = -1.0 / (2.0 * sigma) - epsilon * sigma;
  const double log_first = LogNormalCdf(upper);
  const double log_second = epsilon + LogNormalCdf(lower);
  if (log_second >= log_first) return Delta::Zero();
  return Delta::FromLog(
      std::min(0.0, log_first + Log1mExp(log_second - log_first)));
}

absl::StatusOr<double> GaussianEpsilon(double sigma, const Delta& delta) {
  RETURN_IF_ERROR(CheckSigma(sigma));
  RETURN_IF_ERROR(CheckOpenUnitDelta(delta));
  auto delta_fn = [sigma](double eps) { return GaussianDelta(sigma, eps); };
  return InvertDeltaFnExpanding(delta_fn, delta, {0.0, 1.0},
                                /*allow_negative=*/true, /*rel_tol=*/1e-12);
}

absl::StatusOr<double> GaussianRdp(double sigma, double alpha) {
  RETURN_IF_ERROR(CheckSigma(sigma));
  if (!(alpha >= 1) || !std::isfinite(alpha)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("alpha must be >= 1, got %g", alpha));
  }
  return alpha / (2.0 * sigma * sigma);
}

absl::StatusOr<Delta> RdpToDelta(double rho, double alpha, double epsilon) {
  if (!(alpha > 1) || !std::isfinite(alpha)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("alpha must be > 1, got %g", alpha));
  }
  if (!(rho >= 0) || !std::isfinite(rho)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("rho must be finite and >= 0, got %g", rho));
  }
  if (!(epsilon > 0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("epsilon must be positive, got %g", epsilon));
  }
  const double log_delta =
      (alpha - 1.0) * (rho - epsilon) + ConversionLogConstant(alpha);
  return Delta::FromLog(std::min(0.0, log_delta));
}

absl::StatusOr<RdpEpsilon> RdpToEpsilonLazy(const RhoFunction& rho,
                                            int max_alpha, const Delta& delta) {
  RETURN_IF_ERROR(CheckOpenUnitDelta(delta));
  if (max_alpha < 2) {
    return absl::InvalidArgumentError("RDP curve is empty (max_alpha < 2)");
  }
  const double log_delta = delta.log_value();
  // suffix_min_offset[a] = min over orders >= a of the order-dependent part
  // of epsilon; with rho non-decreasing, rho(a) + suffix_min_offset[a] lower
  // bounds every epsilon still reachable.
  std::vector<double> suffix_min_offset(max_alpha + 2,
                                        std::numeric_limits<double>::infinity());
  for (int a = max_alpha; a >= 2; --a) {
    suffix_min_offset[a] =
        std::min(suffix_min_offset[a + 1], OffsetAtOrder(a, log_delta));
  }
  RdpEpsilon best{std::numeric_limits<double>::infinity(), 0, 0};
  for (int alpha = 2; alpha <= max_alpha; ++alpha) {
    ASSIGN_OR_RETURN(const double r, rho(alpha));
    ++best.orders_evaluated;
    const double eps = EpsilonAtOrder(r, alpha, log_delta);
    if (eps < best.epsilon) {
      best.epsilon = eps;
      best.best_alpha = alpha;
    }
    if (alpha < max_alpha && r + suffix_min_offset[alpha + 1] >= best.epsilon) {
      break;
    }
  }
  return best;
}

absl::StatusOr<RdpEpsilon> RdpToEpsilon(const RdpCurve& curve,
                                        const Delta& delta) {
  RETURN_IF_ERROR(CheckOpenUnitDelta(delta));
  if (curve.size() == 0) {
    return absl::InvalidArgumentError("RDP curve is empty");
  }
  const double log_delta = delta.log_value();
  const auto& orders = curve.orders();
  const auto& rho = curve.rho();
  std::vector<double> suffix_min_offset(orders.size() + 1,
                                        std::numeric_limits<double>::infinity());
  for (size_t i = orders.size(); i-- > 0;) {
    suffix_min_offset[i] =
        std::min(suffix_min_offset[i + 1], OffsetAtOrder(orders[i], log_delta));
  }
  RdpEpsilon best{std::numeric_limits<double>::infinity(), 0, 0};
  for (size_t i = 0; i < orders.size(); ++i) {
    ++best.orders_evaluated;
    const double eps = EpsilonAtOrder(rho[i], orders[i], log_delta);
    if (eps < best.epsilon) {
      best.epsilon = eps;
      best.best_alpha = orders[i];
    }
    if (rho[i] + suffix_min_offset[i + 1] >= best.epsilon) break;
  }
  return best;
}

absl::StatusOr<RdpEpsilon> RdpToEpsilonExhaustive(const RdpCurve& curve,
                                                  const Delta& delta) {
  RETURN_IF_ERROR(CheckOpenUnitDelta(delta));
  if (curve.size() == 0) {
    return absl::InvalidArgumentError("RDP curve is empty");
  }
  RdpEpsilon best{std::numeric_limits<double>::infinity(), 0, 0};
  for (size_t i = 0; i < curve.size(); ++i) {
    ++best.orders_evaluated;
    const double eps =
        EpsilonAtOrder(curve.rho()[i], curve.orders()[i], delta.log_value());
    if (eps < best.epsilon) {
      best.epsilon = eps;
      best.best_alpha = curve.orders()[i];
    }
  }
  return best;
}

absl::StatusOr<RdpDelta> RdpCurveToDelta(const RdpCurve& curve,
                                         double epsilon) {
  if (curve.size() == 0) {
    return absl::InvalidArgumentError("RDP curve is empty");
  }
  RdpDelta best{Delta::One(), 0};
  bool first = true;
  for (size_t i = 0; i < curve.size(); ++i) {
    ASSIGN_OR_RETURN(Delta d,
                     RdpToDelta(curve.rho()[i], curve.orders()[i], epsilon));
    if (first || d < best.delta) {
      best = {d, curve.orders()[i]};
      first = false;
    }
  }
  return best;
}

absl::StatusOr<double> InvertDeltaFn(const DeltaFunction& delta_fn,
                                     const Delta& target, Bracket bracket,
                                     double rel_tol) {
  if (!(bracket.lo <= bracket.hi)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "invalid bracket [%g, %g]", bracket.lo, bracket.hi));
  }
  ASSIGN_OR_RETURN(const Delta at_lo, delta_fn(bracket.lo));
  if (at_lo <= target) return bracket.lo;
  ASSIGN_OR_RETURN(const Delta at_hi, delta_fn(bracket.hi));
  if (target < at_hi) {
    return absl::OutOfRangeError(absl::StrFormat(
        "target unattainable: delta(%g)=%g and delta(%g)=%g both exceed "
        "target %g",
        bracket.lo, at_lo.value(), bracket.hi, at_hi.value(), target.value()));
  }
  double lo = bracket.lo;
  double hi = bracket.hi;
  for (int step = 0; step < kMaxBisectionSteps; ++step) {
    if (hi - lo <= rel_tol * std::max(std::abs(lo), std::abs(hi)) ||
        hi - lo <= 1e-300) {
      break;
    }
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    ASSIGN_OR_RETURN(const Delta at_mid, delta_fn(mid));
    if (at_mid <= target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

absl::StatusOr<double> InvertDeltaFnExpanding(const DeltaFunction& delta_fn,
                                              const Delta& target,
                                              Bracket bracket,
                                              bool allow_negative,
                                              double rel_tol) {
  for (int i = 0; i < kMaxBracketExpansions; ++i) {
    ASSIGN_OR_RETURN(const Delta at_hi, delta_fn(bracket.hi));
    if (at_hi <= target) break;
    if (bracket.hi >= kBracketCeiling) {
      return absl::OutOfRangeError(absl::StrFormat(
          "target unattainable: delta(%g)=%g still exceeds target %g",
          bracket.hi, at_hi.value(), target.value()));
    }
    bracket.lo = bracket.hi;
    bracket.hi = std::min(kBracketCeiling,
                          bracket.hi > 0 ? 2.0 * bracket.hi : 1.0);
  }
  if (allow_negative) {
    double width = std::max(1.0, std::abs(bracket.lo));
    for (int i = 0; i < kMaxBracketExpansions; ++i) {
      ASSIGN_OR_RETURN(const Delta at_lo, delta_fn(bracket.lo));
      if (target < at_lo) break;
      bracket.hi = bracket.lo;
      bracket.lo -= width;
      width *= 2.0;
    }
  }
  return InvertDeltaFn(delta_fn, target, bracket, rel_tol);
}

}  // namespace allocdp
