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

// Log-space arithmetic and normal-distribution tails.

#ifndef ALLOCDP_LOG_MATH_H_
#define ALLOCDP_LOG_MATH_H_

#include <cstdint>
#include <limits>
#include <span>

namespace allocdp {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// ln(e^a + e^b).
double LogAddExp(double a, double b);

// ln(1 - e^x) for x <= 0. Returns -inf at x = 0.
double Log1mExp(double x);

// ln(e^x - 1) for x > 0.
double LogExpm1(double x);

// ln(1 + e^x).
double Softplus(double x);

// Two-pass ln(sum_i e^{x_i}). Empty input gives -inf.
double LogSumExp(std::span<const double> values);

// Streaming log-sum-exp. Adding the same sequence always produces the same
// result, independent of how the caller batches it.
class LogSumExpAccumulator {
 public:
  void Add(double log_value);
  void Merge(const LogSumExpAccumulator& other);
  double Result() const;

 private:
  double max_ = kNegInf;
  double scaled_sum_ = 0.0;  // sum of e^{x - max_}
};

// Kahan-compensated running sum.
class KahanSum {
 public:
  void Add(double x);
  double Sum() const { return sum_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

// Standard normal CDF and its logarithm. The log form stays accurate deep
// into the lower tail (uses a continued fraction for the Mills ratio below
// -8), so ln Phi(-40) is finite and correct to double precision.
double NormalCdf(double x);
double LogNormalCdf(double x);

// ln(n!) for n >= 0.
double LogFactorial(int64_t n);

// ln C(n, k).
double LogBinomial(int64_t n, int64_t k);

}  // namespace allocdp

#endif  // ALLOCDP_LOG_MATH_H_
