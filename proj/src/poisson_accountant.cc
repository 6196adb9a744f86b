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

#include "allocdp/poisson_accountant.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <tuple>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "allocdp/log_math.h"
#include "allocdp/status_macros.h"

namespace allocdp {
namespace {

constexpr int kQuadratureDepth = 18;
constexpr double kQuadratureTolerance = 1e-13;
// Half-width of the integration window in units of sigma. The log-integrand
// has curvature at least 1/sigma^2, so it has dropped by > 70 nats there.
constexpr double kWindowSigmas = 12.0;
// Below this value of ln E_Q[(Q/M)^(alpha-1)] the integral is recomputed as
// E_Q[(Q/M)^(alpha-1) - 1] to keep relative precision for tiny rates.
constexpr double kSmallLogMoment = 1e-2;

absl::Status CheckRate(double sigma, double lambda) {
  if (!(sigma > 0) || !std::isfinite(sigma)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("sigma must be positive and finite, got %g", sigma));
  }
  if (!(lambda >= 0 && lambda <= 1)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("lambda must lie in [0, 1], got %g", lambda));
  }
  return absl::OkStatus();
}

// ln(M(x) / Q(x)) = ln(1 - lambda + lambda e^u), u = (2x - 1) / (2 sigma^2).
double LogMixtureRatio(double x, double sigma, double lambda) {
  const double u = (2.0 * x - 1.0) / (2.0 * sigma * sigma);
  if (lambda == 1.0) return u;
  // log1p keeps precision while the correction is small; otherwise the
  // two-term form avoids cancellation in 1 - lambda + lambda e^u.
  const double correction = lambda * std::expm1(std::min(u, 30.0));
  if (std::abs(correction) < 0.5) return std::log1p(correction);
  return LogAddExp(std::log1p(-lambda), std::log(lambda) + u);
}

// Posterior weight of the shifted component, in [0, 1].
double MixtureWeight(double x, double sigma, double lambda) {
  const double u = (2.0 * x - 1.0) / (2.0 * sigma * sigma);
  return std::exp(std::log(lambda) + u - LogMixtureRatio(x, sigma, lambda));
}

double LogGaussianDensity(double x, double sigma) {
  return -x * x / (2.0 * sigma * sigma) -
         0.5 * std::log(2.0 * std::numbers::pi * sigma * sigma);
}

// Mode of the concave log-integrand ln Q(x) - (alpha - 1) ln(M(x)/Q(x)):
// the root of x + (alpha - 1) w(x) = 0, which lies in [-(alpha - 1), 0].
double IntegrandMode(double sigma, double lambda, double alpha) {
  double lo = -(alpha - 1.0);
  double hi = 0.0;
  for (int i = 0; i < 200 && hi - lo > 1e-14 * std::max(1.0, -lo); ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid + (alpha - 1.0) * MixtureWeight(mid, sigma, lambda) > 0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

absl::StatusOr<double> ComputeAddStep(double sigma, double lambda,
                                      double alpha) {
  using Integrator = boost::math::quadrature::gauss_kronrod<double, 31>;
  const double power = alpha - 1.0;
  auto log_integrand = [&](double x) {
    return LogGaussianDensity(x, sigma) -
           power * LogMixtureRatio(x, sigma, lambda);
  };
  const double mode = IntegrandMode(sigma, lambda, alpha);
  const double peak = log_integrand(mode);
  const double window = kWindowSigmas * sigma;

  double error = 0.0;
  const double scaled = Integrator::integrate(
      [&](double x) { return std::exp(log_integrand(x) - peak); },
      mode - window, mode + window, kQuadratureDepth, kQuadratureTolerance,
      &error);
  if (!(scaled > 0) || !std::isfinite(scaled) ||
      error > 1e-8 * scaled) {
    return absl::InternalError(absl::StrFormat(
        "add-direction quadrature did not converge (sigma=%g, lambda=%g, "
        "alpha=%g): achieved error %g on integral %g",
        sigma, lambda, alpha, error, scaled));
  }
  const double log_moment = peak + std::log(scaled);
  if (log_moment >= kSmallLogMoment) {
    return std::max(0.0, log_moment / power);
  }

  // E_Q[(Q/M)^(alpha-1)] - 1 integrated directly.
  const double lo = std::min(mode, 0.0) - window;
  const double hi = std::max(mode, 1.0) + window;
  double l1 = 0.0;
  const double excess = Integrator::integrate(
      [&](double x) {
        return std::exp(LogGaussianDensity(x, sigma)) *
               std::expm1(-power * LogMixtureRatio(x, sigma, lambda));
      },
      lo, hi, kQuadratureDepth, kQuadratureTolerance, &error, &l1);
  if (!std::isfinite(excess) || error > 1e-9 * std::max(l1, 1e-300) + 1e-300) {
    return absl::InternalError(absl::StrFormat(
        "add-direction quadrature did not converge (sigma=%g, lambda=%g, "
        "alpha=%g): achieved error %g on integral %g",
        sigma, lambda, alpha, error, excess));
  }
  return std::max(0.0, std::log1p(std::max(0.0, excess)) / power);
}

class AddStepMemo {
 public:
  absl::StatusOr<double> Get(double sigma, double lambda, double alpha) {
    const Key key{sigma, lambda, alpha};
    {
      std::shared_lock lock(mu_);
      auto it = values_.find(key);
      if (it != values_.end()) return it->second;
    }
    ASSIGN_OR_RETURN(const double value, ComputeAddStep(sigma, lambda, alpha));
    std::unique_lock lock(mu_);
    values_.emplace(key, value);
    return value;
  }

 private:
  using Key = std::tuple<double, double, double>;
  std::shared_mutex mu_;
  std::map<Key, double> values_;
};

AddStepMemo& GlobalAddStepMemo() {
  static auto* memo = new AddStepMemo();
  return *memo;
}

}  // namespace

absl::Status ValidatePoissonConfig(const PoissonConfig& config) {
  RETURN_IF_ERROR(CheckRate(config.sigma, config.lambda));
  if (config.t < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("t must be >= 1, got %d", config.t));
  }
  return absl::OkStatus();
}

absl::StatusOr<double> PoissonRdpRemoveStep(double sigma, double lambda,
                                            int alpha) {
  RETURN_IF_ERROR(CheckRate(sigma, lambda));
  if (alpha < 2) {
    return absl::InvalidArgumentError(
        absl::StrFormat("alpha must be an integer >= 2, got %d", alpha));
  }
  if (lambda == 0) return 0.0;
  // The binomial weights sum to one, so
  //   E_Q[(M/Q)^alpha] - 1 = sum_{j>=2} C(alpha,j) lambda^j (1-lambda)^(alpha-j)
  //                          (e^{j(j-1)/(2 sigma^2)} - 1),
  // a sum of non-negative terms.
  const double log_lambda = std::log(lambda);
  const double log_complement = std::log1p(-lambda);
  LogSumExpAccumulator excess;
  for (int j = 2; j <= alpha; ++j) {
    double log_term = LogBinomial(alpha, j) + j * log_lambda +
                      LogExpm1(j * (j - 1.0) / (2.0 * sigma * sigma));
    if (j < alpha) log_term += (alpha - j) * log_complement;
    excess.Add(log_term);
  }
  return Softplus(excess.Result()) / (alpha - 1.0);
}

absl::StatusOr<double> PoissonRdpAddStep(double sigma, double lambda,
                                         double alpha) {
  RETURN_IF_ERROR(CheckRate(sigma, lambda));
  if (!(alpha > 1) || !std::isfinite(alpha)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("alpha must be > 1, got %g", alpha));
  }
  if (lambda == 0) return 0.0;
  return GlobalAddStepMemo().Get(sigma, lambda, alpha);
}

absl::StatusOr<RdpCurve> PoissonStepCurve(double sigma, double lambda,
                                          Direction direction, int max_alpha) {
  if (direction == Direction::kBoth) {
    return absl::InvalidArgumentError("step curve needs a one-sided direction");
  }
  std::vector<int> orders;
  std::vector<double> rho;
  for (int alpha = 2; alpha <= max_alpha; ++alpha) {
    double value = 0.0;
    if (direction == Direction::kRemove) {
      ASSIGN_OR_RETURN(value, PoissonRdpRemoveStep(sigma, lambda, alpha));
    } else {
      ASSIGN_OR_RETURN(value, PoissonRdpAddStep(sigma, lambda, alpha));
    }
    orders.push_back(alpha);
    rho.push_back(value);
  }
  return RdpCurve::Create(std::move(orders), std::move(rho));
}

absl::StatusOr<PoissonProfile> PoissonProfile::Create(double sigma,
                                                      double lambda,
                                                      int64_t compositions,
                                                      Direction direction,
                                                      int max_alpha) {
  RETURN_IF_ERROR(CheckRate(sigma, lambda));
  if (compositions < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("compositions must be >= 1, got %d", compositions));
  }
  if (max_alpha < 2) {
    return absl::InvalidArgumentError("max_alpha must be >= 2");
  }
  std::optional<RdpCurve> remove;
  std::optional<RdpCurve> add;
  if (lambda > 0) {
    const double count = static_cast<double>(compositions);
    if (direction != Direction::kAdd) {
      ASSIGN_OR_RETURN(RdpCurve step, PoissonStepCurve(sigma, lambda,
                                                       Direction::kRemove,
                                                       max_alpha));
      remove = step.Composed(count);
    }
    if (direction != Direction::kRemove) {
      ASSIGN_OR_RETURN(RdpCurve step, PoissonStepCurve(sigma, lambda,
                                                       Direction::kAdd,
                                                       max_alpha));
      add = step.Composed(count);
    }
  }
  return PoissonProfile(lambda, std::move(remove), std::move(add));
}

absl::StatusOr<const RdpCurve*> PoissonProfile::CurveFor(
    Direction direction) const {
  const std::optional<RdpCurve>& curve =
      direction == Direction::kRemove ? remove_ : add_;
  if (!curve.has_value()) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "profile was built without the %s direction", std::string(DirectionName(direction))));
  }
  return &*curve;
}

absl::StatusOr<RdpDelta> PoissonProfile::DeltaAt(double epsilon,
                                                 Direction direction) const {
  if (!(epsilon > 0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("epsilon must be positive, got %g", epsilon));
  }
  if (lambda_ == 0) return RdpDelta{Delta::Zero(), 0};
  if (direction == Direction::kBoth) {
    ASSIGN_OR_RETURN(RdpDelta remove, DeltaAt(epsilon, Direction::kRemove));
    ASSIGN_OR_RETURN(RdpDelta add, DeltaAt(epsilon, Direction::kAdd));
    return add.delta <= remove.delta ? remove : add;
  }
  ASSIGN_OR_RETURN(const RdpCurve* curve, CurveFor(direction));
  return RdpCurveToDelta(*curve, epsilon);
}

absl::StatusOr<RdpEpsilon> PoissonProfile::EpsilonAt(
    const Delta& delta, Direction direction) const {
  if (lambda_ == 0) return RdpEpsilon{0.0, 0, 0};
  if (direction == Direction::kBoth) {
    ASSIGN_OR_RETURN(RdpEpsilon remove, EpsilonAt(delta, Direction::kRemove));
    ASSIGN_OR_RETURN(RdpEpsilon add, EpsilonAt(delta, Direction::kAdd));
    return add.epsilon <= remove.epsilon ? remove : add;
  }
  ASSIGN_OR_RETURN(const RdpCurve* curve, CurveFor(direction));
  return RdpToEpsilon(*curve, delta);
}

absl::StatusOr<Delta> PoissonDelta(const PoissonConfig& config, double epsilon,
                                   int64_t compositions) {
  RETURN_IF_ERROR(ValidatePoissonConfig(config));
  ASSIGN_OR_RETURN(PoissonProfile profile,
                   PoissonProfile::Create(config.sigma, config.lambda,
                                          compositions, config.direction));
  ASSIGN_OR_RETURN(RdpDelta result, profile.DeltaAt(epsilon, config.direction));
  return result.delta;
}

absl::StatusOr<RdpEpsilon> PoissonEpsilon(const PoissonConfig& config,
                                          const Delta& delta,
                                          int64_t compositions) {
  RETURN_IF_ERROR(ValidatePoissonConfig(config));
  ASSIGN_OR_RETURN(PoissonProfile profile,
                   PoissonProfile::Create(config.sigma, config.lambda,
                                          compositions, config.direction));
  return profile.EpsilonAt(delta, config.direction);
}

}  // namespace allocdp
