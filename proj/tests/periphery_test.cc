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


#include "bmld/periphery.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "bmld/fft.h"
#include "bmld/stimulus.h"
#include "gtest/gtest.h"

namespace bmld {
namespace {

constexpr double kFs = 48000.0;
constexpr double kPi = std::numbers::pi;

// |H(f)|^2 on the FFT grid, measured from a long impulse response.
struct MeasuredResponse {
  std::vector<double> power;  // bins 0 .. n/2
  double df;
};

MeasuredResponse MeasureGammatone(const GammatoneCoefficients& c) {
  // 96 * 2^11 samples put 500 Hz exactly on a bin.
  const size_t n = 96 << 11;
  RealBuffer impulse(n, 0.0);
  impulse[0] = 1.0;
  const ComplexBuffer h = GammatoneFilter(impulse, c);
  const ComplexBuffer spectrum = ForwardComplex(h);
  MeasuredResponse r;
  r.df = kFs / static_cast<double>(n);
  for (size_t k = 0; k <= n / 2; ++k) r.power.push_back(std::norm(spectrum[k]));
  return r;
}

// Oracle: trapezoid integral of |H|^2 / max |H|^2 over 0 .. fs/2.
double NumericalErb(const MeasuredResponse& r) {
  const double peak = *std::max_element(r.power.begin(), r.power.end());
  double acc = 0.0;
  for (size_t k = 0; k + 1 < r.power.size(); ++k) {
    acc += 0.5 * (r.power[k] + r.power[k + 1]) / peak * r.df;
  }
  return acc;
}

TEST(GammatoneTest, ErbFactorClosedForm) {
  EXPECT_NEAR(GammatoneErbFactor(1), kPi, 1e-12);
  EXPECT_NEAR(GammatoneErbFactor(2), kPi / 2.0, 1e-12);
  EXPECT_NEAR(GammatoneErbFactor(4), kPi * 720.0 / 64.0 / 36.0, 1e-12);
}

TEST(GammatoneTest, NumericalErbMatchesDesign) {
  struct Case {
    int order;
    double erb;
    double tolerance;
  };
  // A single pole has Lorentzian tails; what lies beyond Nyquist is lost.
  for (const Case& c :
       {Case{4, 79.0, 0.01}, Case{2, 167.0, 0.01}, Case{1, 50.0, 0.02}}) {
    const auto coeffs = DesignGammatone(c.order, 500.0, c.erb, kFs);
    EXPECT_NEAR(NumericalErb(MeasureGammatone(coeffs)), c.erb,
                c.tolerance * c.erb)
        << "order " << c.order;
  }
}

TEST(GammatoneTest, UnitGainAtCenter) {
  const auto c = DesignGammatone(4, 500.0, 79.0, kFs);
  EXPECT_NEAR(std::abs(GammatoneResponse(c, 500.0)), 1.0, 1e-12);
  EXPECT_NEAR(std::arg(GammatoneResponse(c, 500.0)), 0.0, 1e-12);
  const MeasuredResponse r = MeasureGammatone(c);
  const auto k = static_cast<size_t>(std::llround(500.0 / r.df));
  EXPECT_NEAR(r.power[k], 1.0, 1e-6);
}

TEST(GammatoneTest, FirstOrderHalfPowerWidth) {
  // A single one-pole resonator has a Lorentzian-like magnitude with
  // half-power full width 2 * lambda.
  const auto c = DesignGammatone(1, 500.0, 60.0, kFs);
  const MeasuredResponse r = MeasureGammatone(c);
  const double peak = *std::max_element(r.power.begin(), r.power.end());
  double lo = 0.0, hi = 0.0;
  for (size_t k = 1; k < r.power.size(); ++k) {
    const double f = k * r.df;
    if (f < 500.0 && r.power[k - 1] < peak / 2 && r.power[k] >= peak / 2) {
      lo = f - r.df * (r.power[k] - peak / 2) / (r.power[k] - r.power[k - 1]);
    }
    if (f > 500.0 && r.power[k - 1] >= peak / 2 && r.power[k] < peak / 2) {
      hi = f - r.df * (r.power[k] - peak / 2) / (r.power[k] - r.power[k - 1]);
    }
  }
  EXPECT_NEAR(hi - lo, 2.0 * c.decay_hz, 0.02 * 2.0 * c.decay_hz);
}

TEST(GammatoneTest, ImpulseEnvelopeIsGammaShaped) {
  const auto c = DesignGammatone(4, 500.0, 79.0, kFs);
  RealBuffer impulse(4000, 0.0);
  impulse[0] = 1.0;
  const ComplexBuffer h = GammatoneFilter(impulse, c);
  // |h[k]| / (t^(n-1) e^(-2 pi lambda t)) tends to a constant.
  std::vector<double> ratio;
  for (size_t k = 200; k < 3000; k += 50) {
    const double t = k / kFs;
    ratio.push_back(std::abs(h[k]) /
                    (std::pow(t, 3) * std::exp(-2.0 * kPi * c.decay_hz * t)));
  }
  const auto [mn, mx] = std::minmax_element(ratio.begin(), ratio.end());
  EXPECT_LT((*mx - *mn) / *mx, 0.03);
  // Envelope peak at t = (n - 1) / (2 pi lambda).
  size_t peak = 0;
  for (size_t k = 0; k < h.size(); ++k) {
    if (std::abs(h[k]) > std::abs(h[peak])) peak = k;
  }
  EXPECT_NEAR(peak / kFs, 3.0 / (2.0 * kPi * c.decay_hz), 2.0 / kFs);
}

TEST(GammatoneTest, ZeroInputAndSteadyTone) {
  const auto c = DesignGammatone(4, 500.0, 79.0, kFs);
  for (const auto& v : GammatoneFilter(RealBuffer(1000, 0.0), c)) {
    ASSERT_EQ(v, std::complex<double>(0.0, 0.0));
  }
  RealBuffer tone(9600);
  for (size_t i = 0; i < tone.size(); ++i) {
    tone[i] = std::cos(2.0 * kPi * 500.0 * i / kFs);
  }
  const ComplexBuffer y = GammatoneFilter(tone, c);
  std::vector<double> mags, steps;
  for (size_t i = 4800; i < y.size(); ++i) {
    mags.push_back(std::abs(y[i]));
    steps.push_back(std::arg(y[i] * std::conj(y[i - 1])));
  }
  const auto [mn, mx] = std::minmax_element(mags.begin(), mags.end());
  // Positive-frequency half of a unit cosine, plus a little image leakage.
  EXPECT_NEAR(*mn, 0.5, 0.01);
  EXPECT_LT(*mx - *mn, 0.01);
  for (double s : steps) ASSERT_NEAR(s, 2.0 * kPi * 500.0 / kFs, 1e-3);
}

TEST(GammatoneTest, DesignValidation) {
  EXPECT_THROW(DesignGammatone(0, 500.0, 79.0, kFs), std::invalid_argument);
  EXPECT_THROW(DesignGammatone(4, 24000.0, 79.0, kFs), std::invalid_argument);
  EXPECT_THROW(DesignGammatone(4, 500.0, 0.0, kFs), std::invalid_argument);
}

TEST(ButterworthTest, CutoffAndDcGain) {
  const auto sections = DesignButterworthLowpass(5, 770.0, kFs);
  EXPECT_EQ(sections.size(), 3u);
  EXPECT_NEAR(SectionsResponseMagnitude(sections, 0.0, kFs), 1.0, 1e-12);
  EXPECT_NEAR(SectionsResponseMagnitude(sections, 770.0, kFs),
              1.0 / std::sqrt(2.0), 1e-9);
  // Oracle: analog fifth-order Butterworth on the pre-warped axis.
  const double wc = std::tan(kPi * 770.0 / kFs);
  for (double f : {100.0, 500.0, 1000.0, 3000.0, 6000.0, 20000.0}) {
    const double w = std::tan(kPi * f / kFs);
    EXPECT_NEAR(SectionsResponseMagnitude(sections, f, kFs),
                1.0 / std::sqrt(1.0 + std::pow(w / wc, 10.0)), 1e-9)
        << f;
  }
}

TEST(HaircellTest, Properties) {
  const Haircell hc(0.4, 5, 770.0, kFs);
  // Non-positive input is silenced.
  RealBuffer neg(500);
  for (size_t i = 0; i < neg.size(); ++i) neg[i] = -std::abs(std::sin(i * 0.1));
  for (double v : hc.Process(neg)) ASSERT_EQ(v, 0.0);
  // Unit DC gain.
  const RealBuffer dc = hc.Process(RealBuffer(6000, 1.0));
  EXPECT_NEAR(dc.back(), 1.0, 1e-9);
  // Homogeneity of degree 0.4.
  RealBuffer x(3000);
  for (size_t i = 0; i < x.size(); ++i) {
    x[i] = std::sin(2.0 * kPi * 500.0 * i / kFs) + 0.3 * std::sin(i * 0.7);
  }
  const double a = 37.0;
  RealBuffer ax = x;
  for (double& v : ax) v *= a;
  const RealBuffer y = hc.Process(x);
  const RealBuffer ay = hc.Process(ax);
  for (size_t i = 0; i < y.size(); ++i) {
    ASSERT_NEAR(ay[i], std::pow(a, 0.4) * y[i], 1e-12 * std::pow(a, 0.4));
  }
}

TEST(HaircellTest, StereoLockstepMatchesMono) {
  const Haircell hc(0.4, 5, 770.0, kFs);
  const StereoSignal s = GenerateBandpassNoise(NoiseSpec{}, 3);
  RealBuffer l = s.left, r = s.right;
  hc.ProcessInPlace(l, r);
  EXPECT_EQ(l, hc.Process(s.left));
  EXPECT_EQ(r, hc.Process(s.right));
}

StereoSignal ToneNoise(TonePhase phase, uint64_t seed) {
  NoiseSpec n;
  n.interaural_mode = DelayedNoise{0.004};
  ToneSpec t;
  t.level_db_spl = 62.0;
  t.phase_mode = phase;
  return MakeInterval(n, t, seed);
}

TEST(PeripheryTest, DioticInputGivesIdenticalChannels) {
  const Periphery p(PeripheryParams{}, kFs);
  const StereoSignal s = GenerateBandpassNoise(NoiseSpec{}, 8);
  ASSERT_EQ(s.left, s.right);
  const PeripheryOutput g = p.Process(s);
  EXPECT_EQ(g.left.samples, g.right.samples);
  EXPECT_EQ(g.left.samples.size(), s.size());
}

TEST(PeripheryTest, AntiphasicToneGivesPiPhase) {
  ToneSpec t;
  t.duration_s = 0.2;
  t.ramp_s = 0.01;
  const StereoSignal s = GenerateTone(t);
  const PeripheryOutput g = Periphery(PeripheryParams{}, kFs).Process(s);
  // The rectifier does not commute with polarity inversion: its DC and even
  // harmonics are common to both ears and leak through the TFS filter, so
  // the steady-state IPD wobbles a little below pi.
  double acc = 0.0;
  for (size_t i = 3000; i < 7000; ++i) {
    const double ipd =
        std::abs(std::arg(g.left.samples[i] * std::conj(g.right.samples[i])));
    ASSERT_NEAR(ipd, kPi, 0.15) << i;
    acc += ipd / 4000.0;
  }
  EXPECT_NEAR(acc, kPi, 0.1);
}

TEST(PeripheryTest, PhaseIsScaleInvariant) {
  const Periphery p(PeripheryParams{}, kFs);
  const StereoSignal s = ToneNoise(TonePhase::kSPi, 21);
  for (double a : {1e-3, 0.5, 40.0}) {
    StereoSignal scaled = s;
    for (double& v : scaled.left) v *= a;
    for (double& v : scaled.right) v *= a;
    const PeripheryOutput g = p.Process(s);
    const PeripheryOutput ga = p.Process(scaled);
    const double gain = std::pow(a, 0.4);
    for (size_t i = 0; i < s.size(); ++i) {
      const auto& x = g.left.samples[i];
      const auto& y = ga.left.samples[i];
      if (std::abs(x) < 1e-12) continue;
      ASSERT_NEAR(std::arg(y * std::conj(x)), 0.0, 1e-9) << i;
      ASSERT_NEAR(std::abs(y) / std::abs(x), gain, 1e-9 * gain) << i;
    }
  }
}

TEST(PeripheryTest, TfsOutputIsBipolar) {
  NoiseSpec n;
  n.duration_s = 2.0;
  const StereoSignal s = GenerateBandpassNoise(n, 2);
  const PeripheryParams params;
  const Periphery periphery(params, kFs);
  const AnalyticChannel g = periphery.Process(s.left);
  auto ratio = [](const std::vector<double>& x) {
    double mean = 0.0, power = 0.0;
    for (double v : x) {
      mean += v;
      power += v * v;
    }
    mean /= x.size();
    return std::abs(mean) / std::sqrt(power / x.size());
  };
  std::vector<double> re;
  for (const auto& v : g.samples) re.push_back(v.real());
  // Haircell input to the TFS stage is unipolar.
  const ComplexBuffer bm = GammatoneFilter(s.left, periphery.peripheral_filter());
  RealBuffer hc;
  for (const auto& v : bm) hc.push_back(2.0 * v.real());
  hc = ApplyHaircell(hc, params, kFs);
  EXPECT_GT(ratio(hc), 0.5);
  // What is left is the DC leak of the TFS gammatone, |H(0)| = 0.043, times
  // the rectified DC: mean / rms = 0.085 for a sinusoid (a0 / (a1 / 2 /
  // sqrt 2) with a0 = 0.399, a1 = 0.570 for sin^0.4).
  EXPECT_NEAR(std::abs(GammatoneResponse(periphery.tfs_filter(), 0.0)), 0.043,
              0.001);
  EXPECT_LT(ratio(re), 0.1);
}

TEST(PeripheryTest, Causality) {
  const Periphery p(PeripheryParams{}, kFs);
  const StereoSignal s = ToneNoise(TonePhase::kSPi, 5);
  const AnalyticChannel full = p.Process(s.left);
  const RealBuffer head(s.left.begin(), s.left.begin() + 9000);
  const AnalyticChannel part = p.Process(head);
  for (size_t i = 0; i < head.size(); ++i) {
    ASSERT_EQ(part.samples[i], full.samples[i]) << i;
  }
}

TEST(PeripheryTest, LockstepStereoMatchesPerChannel) {
  const Periphery p(PeripheryParams{}, kFs);
  const StereoSignal s = ToneNoise(TonePhase::kSPi, 13);
  PlanarStereo planar;
  p.ProcessPlanar(s, planar);
  const AnalyticChannel l = p.Process(s.left);
  const AnalyticChannel r = p.Process(s.right);
  for (size_t i = 0; i < s.size(); ++i) {
    ASSERT_EQ(planar.left_re[i], l.samples[i].real());
    ASSERT_EQ(planar.left_im[i], l.samples[i].imag());
    ASSERT_EQ(planar.right_re[i], r.samples[i].real());
    ASSERT_EQ(planar.right_im[i], r.samples[i].imag());
  }
}

TEST(PeripheryTest, Validation) {
  PeripheryParams bad;
  bad.gt_order = 0;
  EXPECT_THROW(Periphery(bad, kFs), std::invalid_argument);
  bad = PeripheryParams{};
  bad.lp_cutoff = -1.0;
  EXPECT_THROW(Periphery(bad, kFs), std::invalid_argument);
  const Periphery p(PeripheryParams{}, kFs);
  StereoSignal s = GenerateBandpassNoise(NoiseSpec{}, 1);
  s.sample_rate = 44100.0;
  EXPECT_THROW(p.Process(s), std::invalid_argument);
}

}  // namespace
}  // namespace bmld
