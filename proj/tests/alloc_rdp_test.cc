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

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "allocdp/log_math.h"
#include "allocdp/poisson_accountant.h"
#include "gtest/gtest.h"

namespace allocdp {
namespace {

Delta D(double v) { return *Delta::FromValue(v); }

double ClosedFormAlpha2(double sigma, double t) {
  return std::log1p(std::expm1(1.0 / (sigma * sigma)) / t);
}

TEST(AllocRdpRemoveTest, Alpha2ClosedForm) {
  for (double sigma : {0.5, 1.0, 2.0}) {
    for (int64_t t : {1, 2, 3, 10, 100, 1000, 10000}) {
      EXPECT_NEAR(*AllocRdpRemoveGauss(sigma, t, 2), ClosedFormAlpha2(sigma, t),
                  1e-10)
          << sigma << " " << t;
    }
  }
  EXPECT_NEAR(*AllocRdpRemoveGauss(1.0, 2, 2), 0.62011450695827752463, 1e-12);
  EXPECT_NEAR(*AllocRdpRemoveGauss(1.0, 10000, 2), 0.00017181342207454793099,
              1e-16);
}

TEST(AllocRdpRemoveTest, SingleStepIsGaussian) {
  for (int alpha : {2, 5, 17, 60}) {
    EXPECT_NEAR(*AllocRdpRemoveGauss(1.3, 1, alpha), *GaussianRdp(1.3, alpha),
                1e-12 * alpha);
  }
}

// mpmath sums over all t^alpha index sequences.
TEST(AllocRdpRemoveTest, MatchesSequenceEnumerationReference) {
  struct Case {
    double sigma;
    int64_t t;
    int alpha;
    double rho;
  };
  for (const Case& c : {Case{1.0, 3, 3, 0.72535430046979836628},
                        Case{1.0, 4, 4, 0.84802595730607347064},
                        Case{0.8, 3, 5, 2.8129479826761972738},
                        Case{2.0, 5, 3, 0.083185933980856474652}}) {
    EXPECT_NEAR(*AllocRdpRemoveGauss(c.sigma, c.t, c.alpha), c.rho, 1e-12)
        << c.sigma << " " << c.t << " " << c.alpha;
  }
}

// Pre-partition form: multi-indices (i_1..i_t) summing to alpha with
// multinomial weights.
double MultiIndexRho(double sigma, int t, int alpha) {
  LogSumExpAccumulator acc;
  std::vector<int> idx(t, 0);
  std::function<void(int, int)> rec = [&](int pos, int left) {
    if (pos == t - 1) {
      idx[pos] = left;
      double term = LogFactorial(alpha);
      for (int i : idx) {
        term += -LogFactorial(i) + i * (i - 1) / (2 * sigma * sigma);
      }
      acc.Add(term);
      return;
    }
    for (int i = 0; i <= left; ++i) {
      idx[pos] = i;
      rec(pos + 1, left - i);
    }
  };
  rec(0, alpha);
  return (acc.Result() - alpha * std::log(t)) / (alpha - 1);
}

TEST(AllocRdpRemoveTest, MatchesMultiIndexEnumeration) {
  for (double sigma : {0.6, 1.0, 3.0}) {
    for (int t : {2, 3}) {
      for (int alpha : {2, 3, 4}) {
        EXPECT_NEAR(*AllocRdpRemoveGauss(sigma, t, alpha),
                    MultiIndexRho(sigma, t, alpha), 1e-12)
            << sigma << " " << t << " " << alpha;
      }
    }
  }
  EXPECT_NEAR(*AllocRdpRemoveGauss(0.9, 7, 9), MultiIndexRho(0.9, 7, 9),
              1e-11);
}

TEST(AllocRdpRemoveTest, GeneralMatchesGaussian) {
  std::vector<int> orders;
  std::vector<double> rho;
  for (int a = 2; a <= 30; ++a) {
    orders.push_back(a);
    rho.push_back(*GaussianRdp(0.9, a));
  }
  RdpCurve step = *RdpCurve::Create(orders, rho);
  for (int64_t t : {1, 4, 1000}) {
    for (int alpha : {2, 9, 30}) {
      EXPECT_NEAR(*AllocRdpRemoveGeneral(step, t, alpha),
                  *AllocRdpRemoveGauss(0.9, t, alpha), 1e-12)
          << t << " " << alpha;
    }
  }
  EXPECT_NEAR(*AllocRdpRemoveGeneral(step, 1, 9), rho[7], 1e-12);
}

TEST(AllocRdpRemoveTest, GeneralWithZeroMomentsIsZero) {
  RdpCurve zero = *RdpCurve::Create({2, 3, 4, 5, 6}, {0, 0, 0, 0, 0});
  for (int64_t t : {1, 7, 100000}) {
    EXPECT_NEAR(*AllocRdpRemoveGeneral(zero, t, 6), 0.0, 1e-12);
  }
}

TEST(AllocRdpRemoveTest, GeneralWithPoissonStepsIsFinite) {
  RdpCurve step = *PoissonStepCurve(1.0, 0.3, Direction::kRemove, 10);
  const double rho = *AllocRdpRemoveGeneral(step, 20, 10);
  EXPECT_GT(rho, 0.0);
  EXPECT_LT(rho, step.rho().back());
}

TEST(AllocRdpRemoveTest, Errors) {
  EXPECT_FALSE(AllocRdpRemoveGauss(1.0, 10, 61).ok());
  EXPECT_FALSE(AllocRdpRemoveGauss(1.0, 10, 1).ok());
  EXPECT_FALSE(AllocRdpRemoveGauss(0.0, 10, 2).ok());
  EXPECT_FALSE(AllocRdpRemoveGauss(1.0, 0, 2).ok());
  RdpCurve gap = *RdpCurve::Create({2, 4}, {1.0, 2.0});
  EXPECT_FALSE(AllocRdpRemoveGeneral(gap, 3, 4).ok());
}

TEST(AllocRdpRemoveTest, MonotoneInAlphaAndT) {
  for (double sigma : {0.7, 1.5}) {
    RdpCurve prev = *AllocRdpRemoveCurve(sigma, 2, 40);
    for (size_t i = 1; i < prev.size(); ++i) {
      EXPECT_GE(prev.rho()[i], prev.rho()[i - 1]);
    }
    for (int64_t t : {3, 10, 100, 10000}) {
      RdpCurve c = *AllocRdpRemoveCurve(sigma, t, 40);
      for (size_t i = 0; i < c.size(); ++i) {
        EXPECT_LE(c.rho()[i], prev.rho()[i]);
        if (i > 0) {
          EXPECT_GE(c.rho()[i], c.rho()[i - 1]);
        }
      }
      prev = c;
    }
  }
  EXPECT_LT(*AllocRdpRemoveGauss(1.0, 1000000, 4), 1e-4);
}

// exp((alpha-1) rho) = E_Q[((1/t) sum_i e^{l_i})^alpha].
TEST(AllocRdpRemoveTest, AgreesWithMonteCarloMoment) {
  constexpr int kN = 1000000;
  constexpr int kT = 8;
  std::mt19937_64 rng(11);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<double> sum(4, 0.0), sum_sq(4, 0.0);
  for (int i = 0; i < kN; ++i) {
    double r = 0.0;
    for (int j = 0; j < kT; ++j) r += std::exp(noise(rng) - 0.5);
    r /= kT;
    for (int alpha : {2, 3}) {
      const double v = std::pow(r, alpha);
      sum[alpha] += v;
      sum_sq[alpha] += v * v;
    }
  }
  for (int alpha : {2, 3}) {
    const double mean = sum[alpha] / kN;
    const double se = std::sqrt((sum_sq[alpha] / kN - mean * mean) / kN);
    EXPECT_NEAR(mean, std::exp((alpha - 1) * *AllocRdpRemoveGauss(1.0, kT, alpha)),
                3 * se)
        << alpha;
  }
}

TEST(AllocAddTest, Surrogate) {
  EXPECT_NEAR(AllocAddDeltaGauss(1.0, 4, 1.0)->log_value(),
              std::log(0.033842970233552130291), 1e-10);
  for (double eps : {0.1, 1.0, 3.0}) {
    EXPECT_EQ(AllocAddDeltaGauss(1.7, 1, eps)->value(),
              GaussianDelta(1.7, eps)->value());
  }
  // Shifted threshold below zero is still a valid delta.
  Delta d = *AllocAddDeltaGauss(0.3, 50, 0.01);
  EXPECT_GT(d.value(), 0.0);
  EXPECT_LE(d.value(), 1.0);
  EXPECT_EQ(AllocAddDeltaGaussComposed(1.0, 4, 1, 1.0)->value(),
            AllocAddDeltaGauss(1.0, 4, 1.0)->value());
}

TEST(AllocAddTest, ComposedEpsilonInvertsComposedDelta) {
  const double eps = *AllocAddEpsilonGaussComposed(1.0, 100, 4, D(1e-6));
  EXPECT_NEAR(AllocAddDeltaGaussComposed(1.0, 100, 4, eps)->value(), 1e-6,
              1e-6 * 1e-6);
}

TEST(AllocRdpEpsilonTest, SingleStepEqualsGaussianConversion) {
  AllocConfig cfg{.sigma = 1.0, .t = 1};
  std::vector<int> orders;
  std::vector<double> rho;
  for (int a = 2; a <= 60; ++a) {
    orders.push_back(a);
    rho.push_back(a / 2.0);
  }
  const RdpEpsilon want = *RdpToEpsilon(*RdpCurve::Create(orders, rho), D(1e-6));
  AllocRdpEpsilonResult got = *AllocRdpEpsilon(cfg, D(1e-6));
  EXPECT_NEAR(*got.remove, want.epsilon, 1e-12);
  EXPECT_EQ(got.remove_best_alpha, want.best_alpha);
  EXPECT_NEAR(*got.add, *GaussianEpsilon(1.0, D(1e-6)), 1e-8);
  EXPECT_EQ(got.Combined(), std::max(*got.remove, *got.add));
  EXPECT_FALSE(got.add_approximate);
}

TEST(AllocRdpEpsilonTest, RemoveNonIncreasingInT) {
  double prev = 1e300;
  for (int64_t t : {2, 8, 64, 512, 4096}) {
    AllocConfig cfg{.sigma = 1.0, .t = t, .direction = Direction::kRemove};
    const double e = *AllocRdpEpsilon(cfg, D(1e-6))->remove;
    EXPECT_LE(e, prev);
    prev = e;
  }
}

TEST(AllocRdpEpsilonTest, MultiBlockUsesFloorAndComposition) {
  AllocConfig cfg{.sigma = 1.0, .t = 10, .k = 3, .epochs = 2,
                  .direction = Direction::kRemove};
  RdpCurve block = *AllocRdpRemoveCurve(1.0, 3);
  const RdpEpsilon want = *RdpToEpsilon(block.Composed(6), D(1e-6));
  AllocRdpEpsilonResult got = *AllocRdpEpsilon(cfg, D(1e-6));
  EXPECT_NEAR(*got.remove, want.epsilon, 1e-12);
  cfg.direction = Direction::kAdd;
  EXPECT_TRUE(AllocRdpEpsilon(cfg, D(1e-6))->add_approximate);
  cfg.k = 11;
  EXPECT_FALSE(AllocRdpEpsilon(cfg, D(1e-6)).ok());
}

// The RDP side (remove) tracks Poisson over many epochs.
TEST(AllocRdpEpsilonTest, MultiEpochRemoveCloseToPoisson) {
  constexpr int64_t kT = 10000;
  for (int64_t epochs : {4, 8, 16, 32}) {
    AllocConfig cfg{.sigma = 1.0, .t = kT, .epochs = epochs,
                    .direction = Direction::kRemove};
    const double alloc = *AllocRdpEpsilon(cfg, D(1e-8))->remove;
    PoissonConfig pc{.sigma = 1.0, .t = kT, .lambda = 1.0 / kT,
                     .direction = Direction::kRemove};
    const double pois = PoissonEpsilon(pc, D(1e-8), kT * epochs)->epsilon;
    EXPECT_LE(std::abs(alloc - pois), 0.1 * pois) << epochs;
  }
}

// The composed add surrogate carries a shift of m (1 - 1/t) / (2 sigma^2), so
// its epsilon grows at least linearly in the number of blocks.
TEST(AllocRdpEpsilonTest, ComposedAddSurrogateShift) {
  for (int64_t epochs : {1, 4, 16}) {
    AllocConfig cfg{.sigma = 1.0, .t = 10000, .epochs = epochs,
                    .direction = Direction::kAdd};
    const double add = *AllocRdpEpsilon(cfg, D(1e-8))->add;
    EXPECT_GE(add, epochs * (1 - 1e-4) / 2.0);
  }
}

TEST(AllocRdpDeltaTest, RoundTrip) {
  AllocConfig cfg{.sigma = 1.0, .t = 100};
  AllocRdpEpsilonResult e = *AllocRdpEpsilon(cfg, D(1e-5));
  AllocRdpDeltaResult d = *AllocRdpDelta(cfg, e.Combined());
  EXPECT_LE(d.remove->value(), 1e-5 * (1 + 1e-8));
  EXPECT_LE(d.add->value(), 1e-5 * (1 + 1e-8));
}

}  // namespace
}  // namespace allocdp
