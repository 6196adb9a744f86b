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

#include "allocdp/log_math.h"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace allocdp {
namespace {

// Below this argument the normal CDF is evaluated through the Mills ratio.
constexpr double kTailCutoff = -8.0;
constexpr int kMillsTerms = 120;

}  // namespace

double LogAddExp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

double Log1mExp(double x) {
  if (x >= 0) return kNegInf;
  // Maechler's switch point keeps both branches at full precision.
  if (x > -std::numbers::ln2) return std::log(-std::expm1(x));
  return std::log1p(-std::exp(x));
}

double LogExpm1(double x) {
  if (x > 30) return x + std::log1p(-std::exp(-x));
  return std::log(std::expm1(x));
}

double Softplus(double x) {
  if (x > 30) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double LogSumExp(std::span<const double> values) {
  double max = kNegInf;
  for (double v : values) max = std::max(max, v);
  if (max == kNegInf) return kNegInf;
  if (std::isinf(max)) return max;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - max);
  return max + std::log(sum);
}

void LogSumExpAccumulator::Add(double log_value) {
  if (log_value == kNegInf) return;
  if (log_value <= max_) {
    scaled_sum_ += std::exp(log_value - max_);
  } else {
    scaled_sum_ = scaled_sum_ * std::exp(max_ - log_value) + 1.0;
    max_ = log_value;
  }
}

void LogSumExpAccumulator::Merge(const LogSumExpAccumulator& other) {
  if (other.max_ == kNegInf) return;
  if (max_ == kNegInf) {
    *this = other;
    return;
  }
  if (other.max_ <= max_) {
    scaled_sum_ += other.scaled_sum_ * std::exp(other.max_ - max_);
  } else {
    scaled_sum_ = scaled_sum_ * std::exp(max_ - other.max_) + other.scaled_sum_;
    max_ = other.max_;
  }
}

double LogSumExpAccumulator::Result() const {
  if (max_ == kNegInf) return kNegInf;
  return max_ + std::log(scaled_sum_);
}

void KahanSum::Add(double x) {
  const double y = x - compensation_;
  const double t = sum_ + y;
  compensation_ = (t - sum_) - y;
  sum_ = t;
}

double NormalCdf(double x) {
  if (std::isnan(x)) return x;
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double LogNormalCdf(double x) {
  if (std::isnan(x)) return x;
  if (x == -std::numeric_limits<double>::infinity()) return kNegInf;
  if (x > 0) return std::log1p(-0.5 * std::erfc(x / std::numbers::sqrt2));
  if (x >= kTailCutoff) return std::log(0.5 * std::erfc(-x / std::numbers::sqrt2));
  // Phi(x) = phi(x) / f with f = z + 1/(z + 2/(z + 3/(z + ...))), z = -x.
  const double z = -x;
  double f = z;
  for (int k = kMillsTerms; k >= 1; --k) f = z + k / f;
  return -0.5 * x * x - 0.5 * std::log(2.0 * std::numbers::pi) - std::log(f);
}

double LogFactorial(int64_t n) { return std::lgamma(static_cast<double>(n) + 1.0); }

double LogBinomial(int64_t n, int64_t k) {
  if (k < 0 || k > n) return kNegInf;
  return LogFactorial(n) - LogFactorial(k) - LogFactorial(n - k);
}

}  // namespace allocdp
