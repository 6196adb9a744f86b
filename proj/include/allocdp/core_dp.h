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

// Exact Gaussian-mechanism divergences, RDP to (epsilon, delta) conversion
// and monotone inversion of privacy profiles.
//
// Every delta is carried together with its natural logarithm so that sums of
// terms spanning hundreds of orders of magnitude stay exact in log space.

#ifndef ALLOCDP_CORE_DP_H_
#define ALLOCDP_CORE_DP_H_

#include <functional>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"

namespace allocdp {

// Adjacency direction. kRemove compares the dataset containing the element
// against the one where it is replaced by the null element; kAdd swaps the
// two. kBoth is the maximum of the two one-sided quantities.
enum class Direction { kRemove, kAdd, kBoth };

std::string_view DirectionName(Direction direction);
absl::StatusOr<Direction> ParseDirection(std::string_view name);

// A probability in [0, 1] stored in linear and log form.
class Delta {
 public:
  static absl::StatusOr<Delta> FromValue(double value);
  static absl::StatusOr<Delta> FromLog(double log_value);
  static Delta Zero() { return Delta(0.0, -std::numeric_limits<double>::infinity()); }
  static Delta One() { return Delta(1.0, 0.0); }

  double value() const { return value_; }
  double log_value() const { return log_value_; }

  // Saturating sum (clamped at 1), computed in log space.
  Delta operator+(const Delta& other) const;
  // Scales by a non-negative factor, clamped to [0, 1].
  Delta Scaled(double factor) const;

  friend bool operator<(const Delta& a, const Delta& b) {
    return a.log_value_ < b.log_value_;
  }
  friend bool operator<=(const Delta& a, const Delta& b) {
    return a.log_value_ <= b.log_value_;
  }

 private:
  Delta(double value, double log_value) : value_(value), log_value_(log_value) {}
  double value_;
  double log_value_;
};

Delta Max(const Delta& a, const Delta& b);
Delta Min(const Delta& a, const Delta& b);

// Integer-order Renyi divergence bounds rho(alpha), orders strictly
// increasing from 2, values finite, non-negative and non-decreasing.
class RdpCurve {
 public:
  static absl::StatusOr<RdpCurve> Create(std::vector<int> orders,
                                         std::vector<double> rho);

  const std::vector<int>& orders() const { return orders_; }
  const std::vector<double>& rho() const { return rho_; }
  size_t size() const { return orders_.size(); }
  std::optional<double> At(int alpha) const;

  // Sequential composition of `count` copies: rho scales linearly.
  RdpCurve Composed(double count) const;

 private:
  RdpCurve(std::vector<int> orders, std::vector<double> rho)
      : orders_(std::move(orders)), rho_(std::move(rho)) {}
  std::vector<int> orders_;
  std::vector<double> rho_;
};

inline constexpr int kDefaultMaxAlpha = 60;

// Exact hockey-stick divergence of (N(1, sigma^2), N(0, sigma^2)) at
// threshold e^epsilon. Negative epsilon is allowed.
absl::StatusOr<Delta> GaussianDelta(double sigma, double epsilon);

// Smallest epsilon (possibly negative) with GaussianDelta(sigma, eps) <= delta.
absl::StatusOr<double> GaussianEpsilon(double sigma, const Delta& delta);

// alpha / (2 sigma^2).
absl::StatusOr<double> GaussianRdp(double sigma, double alpha);

// Hockey-stick bound implied by D_alpha <= rho, clamped to [0, 1].
absl::StatusOr<Delta> RdpToDelta(double rho, double alpha, double epsilon);

struct RdpEpsilon {
  double epsilon;
  int best_alpha;
  // Number of orders whose rho was examined before the search stopped.
  int orders_evaluated;
};

struct RdpDelta {
  Delta delta;
  int best_alpha;
};

// Minimum over the curve's orders of the epsilon implied at `delta`.
// Scans orders upward and stops once rho(alpha) alone exceeds the best
// epsilon found so far. Ties go to the smaller order.
absl::StatusOr<RdpEpsilon> RdpToEpsilon(const RdpCurve& curve,
                                        const Delta& delta);

// Same minimum without early stopping; used to check the stopping rule.
absl::StatusOr<RdpEpsilon> RdpToEpsilonExhaustive(const RdpCurve& curve,
                                                  const Delta& delta);

// Early-stopping search where rho(alpha) is computed on demand for
// alpha = 2, 3, ..., max_alpha. Orders past the stopping point are never
// requested.
using RhoFunction = std::function<absl::StatusOr<double>(int alpha)>;
absl::StatusOr<RdpEpsilon> RdpToEpsilonLazy(const RhoFunction& rho,
                                            int max_alpha, const Delta& delta);

// Minimum over the curve of RdpToDelta.
absl::StatusOr<RdpDelta> RdpCurveToDelta(const RdpCurve& curve, double epsilon);

// Maps epsilon to a delta bound; must be non-increasing in epsilon.
using DeltaFunction = std::function<absl::StatusOr<Delta>(double epsilon)>;

struct Bracket {
  double lo;
  double hi;
};

inline constexpr Bracket kDefaultEpsilonBracket = {1e-6, 100.0};

// Smallest epsilon in [bracket.lo, bracket.hi] with delta_fn(eps) <= target,
// by bisection to relative tolerance `rel_tol`. Returns bracket.lo if the
// target is already met there. Fails with kOutOfRange when delta_fn(hi)
// still exceeds the target; the message carries both endpoint values.
absl::StatusOr<double> InvertDeltaFn(const DeltaFunction& delta_fn,
                                     const Delta& target, Bracket bracket,
                                     double rel_tol = 1e-9);

// Like InvertDeltaFn but grows the bracket geometrically (upper end doubles,
// up to 1e4) until it straddles the target. When `allow_negative` is set the
// lower end also moves below zero.
absl::StatusOr<double> InvertDeltaFnExpanding(
    const DeltaFunction& delta_fn, const Delta& target,
    Bracket bracket = kDefaultEpsilonBracket, bool allow_negative = false,
    double rel_tol = 1e-9);

}  // namespace allocdp

#endif  // ALLOCDP_CORE_DP_H_
