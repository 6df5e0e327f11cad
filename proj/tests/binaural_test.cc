// Copyright 2026 The bmld Authors. All Rights Reserved.
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


#include "bmld/binaural.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "bmld/coherence.h"
#include "bmld/experiments.h"
#include "bmld/observer.h"
#include "bmld/stimulus.h"
#include "gtest/gtest.h"

namespace bmld {
namespace {

constexpr double kFs = 48000.0;
constexpr double kPi = std::numbers::pi;

AnalyticChannel RandomChannel(size_t n, uint64_t seed) {
  Rng rng = MakeRng(seed);
  StandardNormal normal;
  AnalyticChannel c;
  for (size_t i = 0; i < n; ++i) c.samples.emplace_back(normal(rng), normal(rng));
  return c;
}

TEST(WrapTest, PrincipalInterval) {
  EXPECT_EQ(WrapPhase(0.5), 0.5);
  EXPECT_EQ(WrapPhase(kPi), kPi);
  EXPECT_NEAR(WrapPhase(-kPi), kPi, 1e-15);
  EXPECT_NEAR(WrapPhase(3.0 * kPi / 2.0), -kPi / 2.0, 1e-12);
  EXPECT_NEAR(WrapPhase(-7.0), -7.0 + 2.0 * kPi, 1e-12);
}

TEST(ExtractIpdTest, Conventions) {
  const AnalyticChannel l = RandomChannel(1001, 1);
  AnalyticChannel neg = l, rot = l;
  for (auto& v : neg.samples) v = -v;
  for (auto& v : rot.samples) v *= std::polar(1.0, -kPi / 2.0);
  for (double v : ExtractIpd(l, l).values) ASSERT_EQ(v, 0.0);
  for (double v : ExtractIpd(l, neg).values) ASSERT_EQ(v, kPi);
  for (double v : ExtractIpd(l, rot).values) ASSERT_NEAR(v, kPi / 2.0, 1e-12);
  AnalyticChannel zero;
  zero.samples.assign(5, {0.0, 0.0});
  for (double v : ExtractIpd(zero, zero).values) ASSERT_EQ(v, 0.0);
  AnalyticChannel shorter = l;
  shorter.samples.pop_back();
  EXPECT_THROW(ExtractIpd(l, shorter), std::invalid_argument);
}

TEST(ExtractIpdTest, MatchesStdArg) {
  const AnalyticChannel l = RandomChannel(4097, 2);
  const AnalyticChannel r = RandomChannel(4097, 3);
  const IpdTrace t = ExtractIpd(l, r);
  for (size_t i = 0; i < t.values.size(); ++i) {
    ASSERT_NEAR(t.values[i], std::arg(l.samples[i] * std::conj(r.samples[i])),
                1e-14);
    ASSERT_GT(t.values[i], -kPi);
    ASSERT_LE(t.values[i], kPi);
  }
}

TEST(JitterTest, Statistics) {
  IpdTrace zero;
  zero.values.assign(400000, 0.0);
  EXPECT_EQ(AddPhaseJitter(zero, 0.0, 1).values, zero.values);
  const IpdTrace j = AddPhaseJitter(zero, 0.3, 5);
  double sum = 0, sq = 0, abs_sum = 0;
  for (double v : j.values) {
    sum += v;
    sq += v * v;
    abs_sum += std::abs(v);
  }
  const double n = static_cast<double>(j.values.size());
  EXPECT_NEAR(std::sqrt(sq / n - (sum / n) * (sum / n)), 0.3, 0.002);
  // Half-normal mean sigma * sqrt(2 / pi).
  EXPECT_NEAR(abs_sum / n, 0.3 * std::sqrt(2.0 / kPi), 0.002);
  EXPECT_NEAR(MeanAbsIpd(j), abs_sum / n, 1e-12);
  // Large jitter still wraps into (-pi, pi].
  for (double v : AddPhaseJitter(zero, 5.0, 6).values) {
    ASSERT_GT(v, -kPi);
    ASSERT_LE(v, kPi);
  }
  EXPECT_THROW(AddPhaseJitter(zero, -0.1, 1), std::invalid_argument);
}

TEST(MeanAbsIpdTest, Basics) {
  IpdTrace t;
  EXPECT_THROW(MeanAbsIpd(t), std::invalid_argument);
  t.values.assign(100, 0.0);
  EXPECT_EQ(MeanAbsIpd(t), 0.0);
  t.values.assign(100, kPi);
  EXPECT_NEAR(MeanAbsIpd(t), kPi, 1e-13);
}

TEST(MeanAbsIpdTest, UncorrelatedNoiseAveragesHalfPi) {
  NoiseSpec n;
  n.bandwidth = 1000.0;
  n.duration_s = 2.0;
  n.interaural_mode = UncorrelatedNoise{};
  BinauralParams quiet;
  quiet.sigma_ipd = 0.0;
  quiet.sigma_d = 0.0;
  const IntervalModel model(PeripheryParams{}, quiet, kFs);
  double acc = 0.0;
  for (uint64_t seed = 0; seed < 4; ++seed) {
    Rng rng = MakeRng(seed);
    acc += model.MeanAbsIpdWithJitter(GenerateBandpassNoise(n, seed), rng);
  }
  EXPECT_NEAR(acc / 4.0, kPi / 2.0, 0.05);
}

TEST(DecisionTest, FisherZValues) {
  EXPECT_NEAR(FisherZOfMeanIpd(kPi / 2.0, 1e-6), 0.0, 1e-15);
  const double dmax = 0.5 * std::log(2.0 / 1e-6 - 1.0);
  EXPECT_NEAR(dmax, 7.2543, 1e-4);
  EXPECT_NEAR(FisherZOfMeanIpd(0.0, 1e-6), dmax, 1e-9);
  EXPECT_NEAR(FisherZOfMeanIpd(kPi, 1e-6), -dmax, 1e-9);
  EXPECT_EQ(DecisionVariable(kPi / 2.0, 0.0, 1e-6, 1), FisherZOfMeanIpd(kPi / 2.0, 1e-6));
  double prev = std::numeric_limits<double>::infinity();
  for (double m = 0.0; m <= kPi; m += 0.01) {
    const double z = FisherZOfMeanIpd(m, 1e-6);
    EXPECT_LE(std::abs(z), dmax + 1e-12);
    EXPECT_LE(z, prev);
    prev = z;
    if (m > 0.05 && m < kPi - 0.05) {
      EXPECT_NEAR(FisherZOfMeanIpd(kPi - m, 1e-6), -z, 1e-9);
    }
  }
}

TEST(DecisionTest, DetectorNoiseSpread) {
  Rng rng = MakeRng(3);
  double sum = 0, sq = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double d = DecisionVariable(kPi / 2.0, 0.4, 1e-6, rng);
    sum += d;
    sq += d * d;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.005);
  EXPECT_NEAR(std::sqrt(sq / n), 0.4, 0.003);
}

TEST(BinauralParamsTest, Validation) {
  BinauralParams p;
  EXPECT_NO_THROW(p.Validate());
  p.sigma_ipd = -1.0;
  EXPECT_THROW(p.Validate(), std::invalid_argument);
  p = BinauralParams{};
  p.clamp_epsilon = 0.0;
  EXPECT_THROW(p.Validate(), std::invalid_argument);
}

BinauralParams NoInternalNoise() {
  BinauralParams b;
  b.sigma_ipd = 0.0;
  b.sigma_d = 0.0;
  return b;
}

TEST(IntervalTest, DioticNoiseWithoutNoiseIsMaximal) {
  const StereoSignal s = GenerateBandpassNoise(NoiseSpec{}, 4);
  const IntervalModel model(PeripheryParams{}, NoInternalNoise(), kFs);
  Rng rng = MakeRng(1);
  EXPECT_EQ(model.MeanAbsIpdWithJitter(s, rng), 0.0);
  EXPECT_EQ(ProcessInterval(s, PeripheryParams{}, NoInternalNoise(), 9),
            std::atanh(1.0 - 1e-6));
}

TEST(IntervalTest, DeterministicWithoutInternalNoise) {
  NoiseSpec n;
  n.interaural_mode = DelayedNoise{0.002};
  const StereoSignal s = GenerateBandpassNoise(n, 4);
  const double a = ProcessInterval(s, PeripheryParams{}, NoInternalNoise(), 1);
  const double b = ProcessInterval(s, PeripheryParams{}, NoInternalNoise(), 2);
  EXPECT_EQ(a, b);
}

TEST(IntervalTest, ScaleInvariance) {
  NoiseSpec n;
  n.interaural_mode = DelayedNoise{0.004};
  ToneSpec t;
  t.level_db_spl = 55.0;
  const StereoSignal s = MakeInterval(n, t, 12);
  for (double a : {1e-4, 0.3, 25.0}) {
    StereoSignal scaled = s;
    for (double& v : scaled.left) v *= a;
    for (double& v : scaled.right) v *= a;
    for (uint64_t seed : {1u, 2u}) {
      EXPECT_NEAR(ProcessInterval(scaled, PeripheryParams{}, BinauralParams{},
                                  seed),
                  ProcessInterval(s, PeripheryParams{}, BinauralParams{}, seed),
                  1e-9);
    }
  }
}

TEST(IntervalTest, FusedMatchesComposedStages) {
  const IntervalModel model(PeripheryParams{}, BinauralParams{}, kFs);
  for (const InterauralMode& mode :
       {InterauralMode{DelayedNoise{0.0}}, InterauralMode{DelayedNoise{0.008}},
        InterauralMode{UncorrelatedNoise{}},
        InterauralMode{CorrelatedNoise{0.7, 0.002}}}) {
    NoiseSpec n;
    n.interaural_mode = mode;
    ToneSpec t;
    t.level_db_spl = 50.0;
    const StereoSignal s = MakeInterval(n, t, 31);
    for (uint64_t seed : {5u, 6u}) {
      Rng a = MakeRng(seed), b = MakeRng(seed);
      EXPECT_EQ(model.Evaluate(s, a), model.EvaluateReference(s, b))
          << DescribeMode(mode);
      EXPECT_EQ(a(), b());  // both consumed the same number of draws
    }
  }
}

TEST(IntervalTest, DecisionFallsWithToneLevel) {
  const ModelObserver observer(
      MakeCondition(100.0, DelayedNoise{0.0}, TonePhase::kSPi), ModelParams{});
  std::vector<double> means;
  for (std::optional<double> level :
       {std::optional<double>(), std::optional<double>(50.0),
        std::optional<double>(60.0), std::optional<double>(70.0)}) {
    double acc = 0.0;
    const int n = 40;
    for (int i = 0; i < n; ++i) acc += observer.EvaluateInterval(level, 1000 + i);
    means.push_back(acc / n);
  }
  for (size_t i = 1; i < means.size(); ++i) EXPECT_LT(means[i], means[i - 1]);
}

TEST(IntervalTest, MeanIpdTracksEffectiveCoherence) {
  // Without tone and jitter, cos<|dphi|> rises with |gamma| of the filtered
  // noise: rank correlation 1 over the delay grid.
  const IntervalModel model(PeripheryParams{}, NoInternalNoise(), kFs);
  const std::vector<double> delays_ms = {0, 2, 4, 8};
  std::vector<double> cosines, gammas;
  for (double ms : delays_ms) {
    NoiseSpec n;
    n.bandwidth = 1000.0;
    n.interaural_mode = DelayedNoise{ms * 1e-3};
    double acc = 0.0;
    for (uint64_t seed = 0; seed < 8; ++seed) {
      Rng rng = MakeRng(seed);
      acc += model.MeanAbsIpdWithJitter(GenerateBandpassNoise(n, seed), rng);
    }
    cosines.push_back(std::cos(acc / 8.0));
    const std::vector<double> lag = {ms * 1e-3};
    gammas.push_back(
        std::abs(EffectiveGamma(n, PeripheryParams{}, lag).values[0]));
  }
  for (size_t i = 1; i < delays_ms.size(); ++i) {
    EXPECT_LT(gammas[i], gammas[i - 1]);
    EXPECT_LT(cosines[i], cosines[i - 1]);
  }
}

}  // namespace
}  // namespace bmld
