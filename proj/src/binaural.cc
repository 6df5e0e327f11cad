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
#include <numbers>
#include <random>
#include <stdexcept>

#include "vecmath.h"

namespace bmld {
namespace {

constexpr double kPi = std::numbers::pi;

// Cross products l * conj(r) must already be in `re`/`im`; writes
// arg(l * conj(r)) into `phase` with -pi mapped to pi and 0/0 to 0.
void CrossPhases(std::span<const double> re, std::span<const double> im,
                 std::span<double> phase) {
  internal::Atan2(im, re, phase);
  for (size_t i = 0; i < phase.size(); ++i) {
    if (re[i] == 0.0 && im[i] == 0.0) {
      phase[i] = 0.0;
    } else if (phase[i] <= -kPi) {
      phase[i] = kPi;
    }
  }
}

void CrossProducts(std::span<const double> lre, std::span<const double> lim,
                   std::span<const double> rre, std::span<const double> rim,
                   std::span<double> re, std::span<double> im) {
  for (size_t i = 0; i < re.size(); ++i) {
    re[i] = lre[i] * rre[i] + lim[i] * rim[i];
    im[i] = lim[i] * rre[i] - lre[i] * rim[i];
  }
}

struct Scratch {
  PlanarStereo planar;
  RealBuffer re, im, phase;
};

}  // namespace

void BinauralParams::Validate() const {
  if (!(sigma_ipd >= 0.0)) throw std::invalid_argument("sigma_ipd must be >= 0");
  if (!(sigma_d >= 0.0)) throw std::invalid_argument("sigma_d must be >= 0");
  if (!(clamp_epsilon > 0.0 && clamp_epsilon < 1.0)) {
    throw std::invalid_argument("clamp_epsilon must lie in (0, 1)");
  }
}

double WrapPhase(double radians) {
  if (radians > -kPi && radians <= kPi) return radians;
  const double r = std::remainder(radians, 2.0 * kPi);
  return r <= -kPi ? r + 2.0 * kPi : r;
}

IpdTrace ExtractIpd(const AnalyticChannel& left, const AnalyticChannel& right) {
  if (left.samples.size() != right.samples.size()) {
    throw std::invalid_argument("ExtractIpd: channel lengths differ");
  }
  IpdTrace trace;
  trace.sample_rate = left.sample_rate;
  const size_t n = left.samples.size();
  RealBuffer lre(n), lim(n), rre(n), rim(n), re(n), im(n);
  for (size_t i = 0; i < n; ++i) {
    lre[i] = left.samples[i].real();
    lim[i] = left.samples[i].imag();
    rre[i] = right.samples[i].real();
    rim[i] = right.samples[i].imag();
  }
  CrossProducts(lre, lim, rre, rim, re, im);
  trace.values.resize(n);
  CrossPhases(re, im, trace.values);
  return trace;
}

IpdTrace AddPhaseJitter(const IpdTrace& trace, double sigma_ipd, Rng& rng) {
  if (!(sigma_ipd >= 0.0)) throw std::invalid_argument("sigma_ipd < 0");
  IpdTrace out = trace;
  if (sigma_ipd == 0.0) return out;
  StandardNormal normal(0.0, 1.0);
  for (double& v : out.values) v = WrapPhase(v + sigma_ipd * normal(rng));
  return out;
}

IpdTrace AddPhaseJitter(const IpdTrace& trace, double sigma_ipd,
                        uint64_t seed) {
  Rng rng = MakeRng(seed);
  return AddPhaseJitter(trace, sigma_ipd, rng);
}

double MeanAbsIpd(const IpdTrace& trace) {
  if (trace.values.empty()) throw std::invalid_argument("empty IPD trace");
  double acc = 0.0;
  for (double v : trace.values) acc += std::abs(v);
  return acc / static_cast<double>(trace.values.size());
}

double FisherZOfMeanIpd(double mean_abs_ipd, double clamp_epsilon) {
  const double c = std::clamp(std::cos(mean_abs_ipd), -1.0 + clamp_epsilon,
                              1.0 - clamp_epsilon);
  return std::atanh(c);
}

double DecisionVariable(double mean_abs_ipd, double sigma_d,
                        double clamp_epsilon, Rng& rng) {
  double d = FisherZOfMeanIpd(mean_abs_ipd, clamp_epsilon);
  if (sigma_d > 0.0) {
    StandardNormal normal(0.0, 1.0);
    d += sigma_d * normal(rng);
  }
  return d;
}

double DecisionVariable(double mean_abs_ipd, double sigma_d,
                        double clamp_epsilon, uint64_t seed) {
  Rng rng = MakeRng(seed);
  return DecisionVariable(mean_abs_ipd, sigma_d, clamp_epsilon, rng);
}

IntervalModel::IntervalModel(const PeripheryParams& periphery,
                             const BinauralParams& binaural,
                             double sample_rate)
    : periphery_(periphery, sample_rate), binaural_(binaural) {
  binaural_.Validate();
}

double IntervalModel::MeanAbsIpdWithJitter(const StereoSignal& stereo,
                                           Rng& rng) const {
  // Per-thread scratch: intervals are evaluated millions of times and the
  // buffers have the same length every time.
  thread_local Scratch scratch;
  PlanarStereo& g = scratch.planar;
  periphery_.ProcessPlanar(stereo, g);
  const size_t n = g.size();
  if (n == 0) throw std::invalid_argument("empty interval");
  scratch.re.resize(n);
  scratch.im.resize(n);
  scratch.phase.resize(n);
  CrossProducts(g.left_re, g.left_im, g.right_re, g.right_im, scratch.re,
                scratch.im);
  CrossPhases(scratch.re, scratch.im, scratch.phase);
  const double* phase = scratch.phase.data();
  const double sigma = binaural_.sigma_ipd;
  double acc = 0.0;
  if (sigma == 0.0) {
    for (size_t i = 0; i < n; ++i) acc += std::abs(phase[i]);
  } else {
    StandardNormal normal(0.0, 1.0);
    for (size_t i = 0; i < n; ++i) {
      acc += std::abs(WrapPhase(phase[i] + sigma * normal(rng)));
    }
  }
  return acc / static_cast<double>(n);
}

double IntervalModel::Evaluate(const StereoSignal& stereo, Rng& rng) const {
  const double m = MeanAbsIpdWithJitter(stereo, rng);
  return DecisionVariable(m, binaural_.sigma_d, binaural_.clamp_epsilon, rng);
}

double IntervalModel::EvaluateReference(const StereoSignal& stereo,
                                        Rng& rng) const {
  const PeripheryOutput g = periphery_.Process(stereo);
  const IpdTrace ipd = ExtractIpd(g.left, g.right);
  const IpdTrace jittered = AddPhaseJitter(ipd, binaural_.sigma_ipd, rng);
  return DecisionVariable(MeanAbsIpd(jittered), binaural_.sigma_d,
                          binaural_.clamp_epsilon, rng);
}

double ProcessInterval(const StereoSignal& stereo,
                       const PeripheryParams& periphery,
                       const BinauralParams& binaural, uint64_t seed) {
  Rng rng = MakeRng(seed);
  return IntervalModel(periphery, binaural, stereo.sample_rate)
      .Evaluate(stereo, rng);
}

}  // namespace bmld
