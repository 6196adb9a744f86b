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

#include "allocdp/alloc_rdp.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <tuple>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "allocdp/log_math.h"
#include "allocdp/partitions.h"
#include "allocdp/status_macros.h"

namespace allocdp {
namespace {

absl::Status CheckOrder(int alpha, int max_alpha) {
  if (alpha < 2) {
    return absl::InvalidArgumentError(
        absl::StrFormat("alpha must be an integer >= 2, got %d", alpha));
  }
  if (alpha > max_alpha) {
    return absl::OutOfRangeError(absl::StrFormat(
        "order too large: alpha=%d exceeds the configured cap %d", alpha,
        max_alpha));
  }
  return absl::OkStatus();
}

// Shift of the add-direction surrogate threshold for one block.
double AddShift(double sigma, int64_t t) {
  return (1.0 - 1.0 / static_cast<double>(t)) / (2.0 * sigma * sigma);
}

class RemoveGaussMemo {
 public:
  absl::StatusOr<double> Get(double sigma, int64_t t, int alpha,
                             int max_alpha) {
    const Key key{sigma, t, alpha};
    {
      std::shared_lock lock(mu_);
      auto it = values_.find(key);
      if (it != values_.end()) return it->second;
    }
    std::vector<int> orders;
    std::vector<double> rho;
    for (int p = 2; p <= alpha; ++p) {
      orders.push_back(p);
      rho.push_back(p / (2.0 * sigma * sigma));
    }
    ASSIGN_OR_RETURN(RdpCurve step,
                     RdpCurve::Create(std::move(orders), std::move(rho)));
    ASSIGN_OR_RETURN(const double value,
                     AllocRdpRemoveGeneral(step, t, alpha, max_alpha));
    std::unique_lock lock(mu_);
    values_.emplace(key, value);
    return value;
  }

 private:
  using Key = std::tuple<double, int64_t, int>;
  std::shared_mutex mu_;
  std::map<Key, double> values_;
};

RemoveGaussMemo& GlobalRemoveGaussMemo() {
  static auto* memo = new RemoveGaussMemo();
  return *memo;
}

}  // namespace

double LogPartitionCoefficientSum(int64_t t, int alpha) {
  PartitionWeighter weighter(t, alpha);
  PartitionGenerator partitions(alpha, t);
  LogSumExpAccumulator sum;
  while (partitions.Next()) sum.Add(weighter.LogWeight(partitions.parts()));
  return sum.Result();
}

absl::StatusOr<double> AllocRdpRemoveGeneral(const RdpCurve& step_rdp,
                                             int64_t t, int alpha,
                                             int max_alpha) {
  RETURN_IF_ERROR(CheckOrder(alpha, max_alpha));
  if (t < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("t must be >= 1, got %d", t));
  }
  // (p - 1) rho_p for p = 1..alpha.
  std::vector<double> part_exponent(alpha + 1, 0.0);
  for (int p = 2; p <= alpha; ++p) {
    std::optional<double> rho_p = step_rdp.At(p);
    if (!rho_p.has_value()) {
      return absl::InvalidArgumentError(
          absl::StrFormat("step RDP is missing order %d", p));
    }
    part_exponent[p] = (p - 1) * *rho_p;
  }
  // The normalized coefficients sum to one, so
  //   exp((alpha-1) rho) - 1 = sum_Pi w_Pi (exp(sum_p (p-1) rho_p) - 1),
  // a sum of non-negative terms that keeps full relative precision when rho
  // is tiny (large t).
  const double log_normalizer = alpha * std::log(static_cast<double>(t));
  PartitionWeighter weighter(t, alpha);
  PartitionGenerator partitions(alpha, t);
  LogSumExpAccumulator excess;
  while (partitions.Next()) {
    double exponent = 0.0;
    for (int p : partitions.parts()) exponent += part_exponent[p];
    if (exponent <= 0) continue;
    excess.Add(weighter.LogWeight(partitions.parts()) - log_normalizer +
               LogExpm1(exponent));
  }
  return Softplus(excess.Result()) / (alpha - 1.0);
}

absl::StatusOr<double> AllocRdpRemoveGauss(double sigma, int64_t t, int alpha,
                                           int max_alpha) {
  if (!(sigma > 0) || !std::isfinite(sigma)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("sigma must be positive and finite, got %g", sigma));
  }
  RETURN_IF_ERROR(CheckOrder(alpha, max_alpha));
  if (t < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("t must be >= 1, got %d", t));
  }
  return GlobalRemoveGaussMemo().Get(sigma, t, alpha, max_alpha);
}

absl::StatusOr<RdpCurve> AllocRdpRemoveCurve(double sigma, int64_t t,
                                             int max_alpha) {
  std::vector<int> orders;
  std::vector<double> rho;
  for (int alpha = 2; alpha <= max_alpha; ++alpha) {
    ASSIGN_OR_RETURN(const double r,
                     AllocRdpRemoveGauss(sigma, t, alpha, max_alpha));
    orders.push_back(alpha);
    rho.push_back(r);
  }
  return RdpCurve::Create(std::move(orders), std::move(rho));
}

absl::StatusOr<Delta> AllocAddDeltaGauss(double sigma, int64_t t,
                                         double epsilon) {
  return AllocAddDeltaGaussComposed(sigma, t, 1, epsilon);
}

absl::StatusOr<Delta> AllocAddDeltaGaussComposed(double sigma, int64_t t,
                                                 int64_t blocks,
                                                 double epsilon) {
  if (t < 1 || blocks < 1) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "t and blocks must be >= 1, got t=%d blocks=%d", t, blocks));
  }
  if (!(sigma > 0) || !std::isfinite(sigma)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("sigma must be positive and finite, got %g", sigma));
  }
  const double m = static_cast<double>(blocks);
  const double scale = sigma * std::sqrt(static_cast<double>(t) / m);
  return GaussianDelta(scale, epsilon - m * AddShift(sigma, t));
}

absl::StatusOr<double> AllocAddEpsilonGaussComposed(double sigma, int64_t t,
                                                    int64_t blocks,
                                                    const Delta& delta) {
  if (t < 1 || blocks < 1) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "t and blocks must be >= 1, got t=%d blocks=%d", t, blocks));
  }
  if (!(sigma > 0) || !std::isfinite(sigma)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("sigma must be positive and finite, got %g", sigma));
  }
  const double m = static_cast<double>(blocks);
  const double scale = sigma * std::sqrt(static_cast<double>(t) / m);
  ASSIGN_OR_RETURN(const double shifted, GaussianEpsilon(scale, delta));
  return shifted + m * AddShift(sigma, t);
}

double AllocRdpEpsilonResult::Combined() const {
  double value = -std::numeric_limits<double>::infinity();
  if (remove.has_value()) value = std::max(value, *remove);
  if (add.has_value()) value = std::max(value, *add);
  return value;
}

absl::StatusOr<AllocRdpEpsilonResult> AllocRdpEpsilon(const AllocConfig& config,
                                                      const Delta& delta,
                                                      int max_alpha) {
  RETURN_IF_ERROR(ValidateAllocConfig(config));
  ASSIGN_OR_RETURN(const BlockDecomposition blocks,
                   MultiAllocReduce(config.t, config.k));
  const int64_t compositions = blocks.blocks * config.epochs;
  const double count = static_cast<double>(compositions);
  AllocRdpEpsilonResult result;
  if (config.direction != Direction::kAdd) {
    const double sigma = config.sigma;
    const int64_t t_prime = blocks.t_prime;
    RhoFunction rho = [=](int alpha) -> absl::StatusOr<double> {
      ASSIGN_OR_RETURN(const double r,
                       AllocRdpRemoveGauss(sigma, t_prime, alpha, max_alpha));
      return count * r;
    };
    ASSIGN_OR_RETURN(const RdpEpsilon eps,
                     RdpToEpsilonLazy(rho, max_alpha, delta));
    result.remove = eps.epsilon;
    result.remove_best_alpha = eps.best_alpha;
  }
  if (config.direction != Direction::kRemove) {
    ASSIGN_OR_RETURN(const double eps,
                     AllocAddEpsilonGaussComposed(config.sigma, blocks.t_prime,
                                                  compositions, delta));
    result.add = eps;
    result.add_approximate = compositions > 1;
  }
  return result;
}

absl::StatusOr<AllocRdpDeltaResult> AllocRdpDelta(const AllocConfig& config,
                                                  double epsilon,
                                                  int max_alpha) {
  RETURN_IF_ERROR(ValidateAllocConfig(config));
  ASSIGN_OR_RETURN(const BlockDecomposition blocks,
                   MultiAllocReduce(config.t, config.k));
  const int64_t compositions = blocks.blocks * config.epochs;
  AllocRdpDeltaResult result;
  if (config.direction != Direction::kAdd) {
    ASSIGN_OR_RETURN(const RdpCurve curve,
                     AllocRdpRemoveCurve(config.sigma, blocks.t_prime,
                                         max_alpha));
    ASSIGN_OR_RETURN(
        const RdpDelta d,
        RdpCurveToDelta(curve.Composed(static_cast<double>(compositions)),
                        epsilon));
    result.remove = d.delta;
    result.remove_best_alpha = d.best_alpha;
  }
  if (config.direction != Direction::kRemove) {
    ASSIGN_OR_RETURN(const Delta d,
                     AllocAddDeltaGaussComposed(config.sigma, blocks.t_prime,
                                                compositions, epsilon));
    result.add = d;
    result.add_approximate = compositions > 1;
  }
  return result;
}

}  // namespace allocdp
