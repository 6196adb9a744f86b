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

#include <cmath>
#include <vector>

#include "absl/status/status.h"
#include "allocdp/alloc_rdp.h"
#include "allocdp/poisson_accountant.h"
#include "gtest/gtest.h"

namespace allocdp {
namespace {

Delta D(double v) { return *Delta::FromValue(v); }

AddBoundFn DirectAdd(double sigma, int64_t t) {
  return [=](double eps) { return AllocAddDeltaGauss(sigma, t, eps); };
}

TEST(DirectionalTest, CombinedIsMaxOfPresentSides) {
  DirectionalDelta d{.remove = D(0.1), .add = D(0.3)};
  EXPECT_EQ(d.Combined().value(), 0.3);
  d.add.reset();
  EXPECT_EQ(d.Combined().value(), 0.1);
  DirectionalEpsilon e{.remove = 2.0, .add = 1.0};
  EXPECT_EQ(e.Combined(), 2.0);
}

TEST(DecompositionParamsTest, WorkedValues) {
  DecompositionParams p = *DecompositionParams::Create(10, 0.1);
  EXPECT_NEAR(p.gamma_remove, 1.5353399327876297007, 1e-14);
  EXPECT_NEAR(p.EpsRemove(1.0), 0.75101695284158541506, 1e-14);
  DecompositionParams big = *DecompositionParams::Create(10000, 1e-4);
  EXPECT_NEAR(big.gamma_remove, 1.5819306726110492568, 1e-12);
  EXPECT_NEAR(big.gamma_remove, 1.5819767068693264244, 1e-3);
}

TEST(DecompositionParamsTest, Invariants) {
  for (int64_t t : {1, 2, 10, 1000}) {
    DecompositionParams p = *DecompositionParams::Create(t, 1.0 / t);
    EXPECT_GE(p.gamma_remove, 1.0);
    for (double eps : {0.01, 0.5, 2.0, 10.0}) {
      const double er = p.EpsRemove(eps);
      if (t > 1) {
        EXPECT_GT(er, 0.0);
        EXPECT_LT(er, eps);
      }
      EXPECT_NEAR(p.EpsilonFromEpsRemove(er), eps, 1e-12 * eps);
      EXPECT_GT(p.EpsAdd(eps), 0.0);
      EXPECT_TRUE(std::isfinite(p.EpsAdd(eps)));
      EXPECT_GE(p.GammaAdd(eps), 1.0);
    }
  }
  EXPECT_FALSE(DecompositionParams::Create(10, 0.0).ok());
  EXPECT_FALSE(DecompositionParams::Create(10, 1.5).ok());
  EXPECT_FALSE(DecompositionParams::Create(0, 0.5).ok());
}

TEST(DecompositionDeltaTest, SingleStepIsGaussianConversion) {
  AllocConfig cfg{.sigma = 1.0, .t = 1, .direction = Direction::kRemove};
  PoissonConfig pc{.sigma = 1.0, .t = 1, .lambda = 1.0,
                   .direction = Direction::kRemove};
  for (double eps : {0.5, 1.0, 2.0}) {
    EXPECT_DOUBLE_EQ(DecompositionDelta(cfg, eps)->remove->value(),
                     PoissonDelta(pc, eps, 1)->value());
  }
}

TEST(DecompositionDeltaTest, RemoveIsScaledPoisson) {
  AllocConfig cfg{.sigma = 1.0, .t = 10, .direction = Direction::kRemove};
  PoissonConfig pc{.sigma = 1.0, .t = 10, .lambda = 0.1,
                   .direction = Direction::kRemove};
  const double want = 1.5353399327876297007 *
                      PoissonDelta(pc, 0.75101695284158541506, 10)->value();
  EXPECT_NEAR(DecompositionDelta(cfg, 1.0)->remove->value(), want,
              1e-12 * want);
}

TEST(DecompositionDeltaTest, AddIsNonIncreasingAndRoundTrips) {
  AllocConfig cfg{.sigma = 1.0, .t = 64, .direction = Direction::kAdd};
  double prev = 2.0;
  for (double eps = 0.1; eps < 8.0; eps *= 1.5) {
    const double v = DecompositionDelta(cfg, eps)->add->value();
    EXPECT_LE(v, prev);
    prev = v;
  }
  cfg.direction = Direction::kBoth;
  DirectionalEpsilon e = *DecompositionEpsilon(cfg, D(1e-5));
  DirectionalDelta back =
      *DecompositionDelta(cfg, std::max(*e.remove, *e.add));
  EXPECT_LE(back.Combined().value(), 1e-5 * (1 + 1e-8));
}

TEST(DecompositionDeltaTest, RejectsMultiBlock) {
  AllocConfig cfg{.sigma = 1.0, .t = 10, .k = 2};
  EXPECT_FALSE(DecompositionDelta(cfg, 1.0).ok());
  cfg.k = 1;
  cfg.epochs = 2;
  EXPECT_FALSE(DecompositionDelta(cfg, 1.0).ok());
  cfg.epochs = 1;
  EXPECT_FALSE(DecompositionDelta(cfg, 0.0).ok());
}

TEST(TruncatedPoissonParamsTest, WorkedValue) {
  TruncatedPoissonParams p =
      *MakeTruncatedPoissonParams(1.0, 1e-12, 1e-10, 1000000);
  EXPECT_NEAR(p.gamma, 0.010471561874051858553, 1e-4 * 0.0104715);
  EXPECT_NEAR(p.eta, 1.0105823758778310401e-6, 1e-12);
  EXPECT_NEAR(p.eta, 1.0 / (1e6 * (1.0 - p.gamma)), 1e-18);
  EXPECT_FALSE(p.cap_active);
}

TEST(TruncatedPoissonParamsTest, CapClampsToNoAmplification) {
  TruncatedPoissonParams p = *MakeTruncatedPoissonParams(20.0, 1e-6, 1e-6, 100);
  EXPECT_TRUE(p.cap_active);
  EXPECT_DOUBLE_EQ(p.gamma, 0.99);
  EXPECT_NEAR(p.eta, 1.0, 1e-12);
  EXPECT_FALSE(MakeTruncatedPoissonParams(1.0, 1e-6, 1e-6, 1).ok());
  EXPECT_FALSE(MakeTruncatedPoissonParams(1.0, 1e-6, 0.0, 10).ok());
}

TEST(TruncatedPoissonParamsTest, AsymptoticRate) {
  TruncatedPoissonParams p =
      *GaussianTruncatedPoissonParams(5.0, 1e-12, 1e-10, 1000000);
  EXPECT_LE(p.eta * 1e6, 1.05);
  EXPECT_GE(p.eta * 1e6, 1.0);
}

TEST(TruncatedPoissonDeltaTest, IncludesSlackAndFlagsCap) {
  AllocConfig cfg{.sigma = 0.5, .t = 16};
  TruncatedPoissonResult r = *TruncatedPoissonDelta(cfg, 1.0, D(1e-6));
  EXPECT_TRUE(r.cap_active);
  EXPECT_GE(r.delta.Combined().value(), 1e-6 * 0.9999);
  AllocConfig wide{.sigma = 5.0, .t = 1000000, .direction = Direction::kRemove};
  TruncatedPoissonResult w = *TruncatedPoissonDelta(wide, 0.05, D(1e-10));
  EXPECT_FALSE(w.cap_active);
  ASSERT_TRUE(w.remove_params.has_value());
  EXPECT_LT(w.remove_params->eta, 1.1e-6);
}

TEST(TruncatedPoissonEpsilonTest, CloseToPoissonAtLargeT) {
  constexpr int64_t kT = 1000000;
  AllocConfig cfg{.sigma = 5.0, .t = kT};
  TruncatedPoissonEpsilonResult r = *TruncatedPoissonEpsilon(cfg, D(1e-10));
  PoissonConfig pc{.sigma = 5.0, .t = kT, .lambda = 1.0 / kT};
  const double pois = PoissonEpsilon(pc, D(1e-10), kT)->epsilon;
  EXPECT_LE(std::abs(r.epsilon.Combined() - pois), 0.35 * pois);
}

TEST(RecursiveParamsTest, Values) {
  RecursiveParams p = *RecursiveParams::Create(std::log(2.0), 1000);
  EXPECT_NEAR(p.tau, 0.5, 1e-15);
  EXPECT_NEAR(p.eta, 4.0 / 1000, 1e-15);
  EXPECT_FALSE(RecursiveParams::Create(std::log(2.0), 3).ok());
  EXPECT_FALSE(RecursiveParams::Create(0.0, 1000).ok());
  // Large eps' drives tau to zero.
  EXPECT_LT(RecursiveParams::Create(3.0, 1000)->tau, 3e-3);
}

TEST(RecursiveDeltaTest, MatchesFormula) {
  AllocConfig cfg{.sigma = 1.0, .t = 1000};
  AddBoundFn base = [](double) { return Delta::FromValue(1e-3); };
  const double eps_prime = std::log(2.0);
  DirectionalDelta d = *RecursiveDelta(cfg, 1.0, eps_prime, base);
  PoissonProfile p = *PoissonProfile::Create(1.0, 0.004, 1000, Direction::kBoth);
  const double rem = p.DeltaAt(1.0, Direction::kRemove)->delta.value();
  const double add = p.DeltaAt(1.0, Direction::kAdd)->delta.value();
  EXPECT_NEAR(d.remove->value(), rem + 0.5 * 1e-3, 1e-12);
  EXPECT_NEAR(d.add->value(), add + 0.5 * 4.0 * 1e-3, 1e-12);
}

TEST(OptimizeEpsPrimeTest, FallbackWhenGridEmpty) {
  AllocConfig cfg{.sigma = 1.0, .t = 2};
  const AddBoundFn base = DirectAdd(1.0, 2);
  EpsPrimeChoice add = *OptimizeEpsPrime(cfg, 1.0, Direction::kAdd, base);
  EXPECT_TRUE(add.fallback);
  EXPECT_EQ(add.delta->value(), base(1.0)->value());
  EpsPrimeChoice rem = *OptimizeEpsPrime(cfg, 1.0, Direction::kRemove, base);
  EXPECT_TRUE(rem.fallback);
  EXPECT_FALSE(rem.delta.has_value());
  EXPECT_FALSE(OptimizeEpsPrime(cfg, 1.0, Direction::kBoth, base).ok());
}

TEST(OptimizeEpsPrimeTest, CloseToFineGridMinimum) {
  AllocConfig cfg{.sigma = 1.0, .t = 1000, .direction = Direction::kRemove};
  const AddBoundFn base = DirectAdd(1.0, 1000);
  const double eps = 0.5;
  EpsPrimeChoice choice =
      *OptimizeEpsPrime(cfg, eps, Direction::kRemove, base);
  ASSERT_FALSE(choice.fallback);
  const double hi = 0.5 * std::log(1000.0);
  double best = 1.0;
  for (int i = 0; i <= 400; ++i) {
    const double ep = 0.05 * std::pow(hi / 0.05, i / 400.0);
    absl::StatusOr<DirectionalDelta> d = RecursiveDelta(cfg, eps, ep, base);
    if (d.ok()) best = std::min(best, d->remove->value());
  }
  EXPECT_LE(choice.delta->value(), 1.05 * best);
  EXPECT_GT(choice.eps_prime, 0.0);
  EXPECT_LE(choice.eps_prime, hi);
}

TEST(OptimizeEpsPrimeTest, BoundaryHitFlagged) {
  // With a zero base term only the Poisson rate exp(2 eps')/t matters, so
  // the smallest grid point wins.
  AllocConfig cfg{.sigma = 3.0, .t = 100000, .direction = Direction::kRemove};
  AddBoundFn base = [](double) { return Delta::FromValue(0.0); };
  EpsPrimeChoice c = *OptimizeEpsPrime(cfg, 0.1, Direction::kRemove, base);
  EXPECT_TRUE(c.boundary_hit);
}

TEST(OptimizeRecursiveEpsilonTest, NotWorseThanTruncatedPoisson) {
  AllocConfig cfg{.sigma = 1.0, .t = 10000};
  const AddBoundFn base = DirectAdd(1.0, 10000);
  const double hint = DecompositionEpsilon(cfg, D(1e-8))->Combined();
  double rec = 0.0;
  for (Direction dir : {Direction::kRemove, Direction::kAdd}) {
    RecursiveEpsilonChoice c =
        *OptimizeRecursiveEpsilon(cfg, D(1e-8), dir, base, hint);
    ASSERT_TRUE(c.epsilon.has_value());
    rec = std::max(rec, *c.epsilon);
    // The epsilon certifies the target delta.
    AllocConfig one = cfg;
    one.direction = dir;
    DirectionalDelta back = *RecursiveDelta(one, *c.epsilon, c.eps_prime, base);
    EXPECT_LE(back.Combined().value(), 1e-8 * (1 + 1e-6));
  }
  const double trunc = TruncatedPoissonEpsilon(cfg, D(1e-8))->epsilon.Combined();
  EXPECT_LE(rec, trunc);
}

TEST(GaussCorollaryTest, RegimeGate) {
  EXPECT_TRUE(GaussCorollaryRegimeHolds(100.0, 1000000, 1, 1e-10));
  const double need = 8.0 * std::sqrt(std::log(1e6 / 1e-10));
  EXPECT_FALSE(GaussCorollaryRegimeHolds(need * 0.999, 1000000, 1, 1e-10));
  EXPECT_TRUE(GaussCorollaryRegimeHolds(need * 1.001, 1000000, 1, 1e-10));
  EXPECT_FALSE(GaussCorollaryRegimeHolds(100.0, 1000, 1000, 1e-10));
}

TEST(GaussCorollaryTest, DeltaFormula) {
  AllocConfig cfg{.sigma = 100.0, .t = 1000000};
  DirectionalDelta d = *GaussCombinedKDelta(cfg, 0.01, D(1e-10));
  PoissonProfile p =
      *PoissonProfile::Create(100.0, 2e-6, 1000000, Direction::kBoth);
  EXPECT_NEAR(d.remove->value(),
              p.DeltaAt(0.01, Direction::kRemove)->delta.value() + 2e-10,
              1e-12 * d.remove->value());
  EXPECT_NEAR(d.add->value(),
              p.DeltaAt(0.01, Direction::kAdd)->delta.value() + 2e-10,
              1e-12 * d.add->value());
  cfg.sigma = 10.0;
  EXPECT_EQ(GaussCombinedKDelta(cfg, 0.01, D(1e-10)).status().code(),
            absl::StatusCode::kFailedPrecondition);
  AllocConfig full{.sigma = 100.0, .t = 1000, .k = 1000};
  EXPECT_EQ(GaussCombinedKDelta(full, 0.01, D(1e-10)).status().code(),
            absl::StatusCode::kFailedPrecondition);
  EXPECT_EQ(GaussCombinedKEpsilon(full, D(1e-10)).status().code(),
            absl::StatusCode::kFailedPrecondition);
}

}  // namespace
}  // namespace allocdp
