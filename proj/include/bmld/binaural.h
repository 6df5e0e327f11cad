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

#ifndef BMLD_BINAURAL_H_
#define BMLD_BINAURAL_H_

#include <cstdint>
#include <span>

#include "bmld/periphery.h"
#include "bmld/rng.h"
#include "bmld/signal.h"

namespace bmld {

struct BinauralParams {
  double sigma_ipd = 0.3;  // rad
  double sigma_d = 0.4;
  double clamp_epsilon = 1e-6;

  void Validate() const;
};

// Instantaneous IPD in radians, every value in (-pi, pi].
struct IpdTrace {
  RealBuffer values;
  double sample_rate = kDefaultSampleRate;
};

// Wraps an angle to (-pi, pi].
double WrapPhase(double radians);

// arg(left * conj(right)); samples where both magnitudes are zero give 0.
IpdTrace ExtractIpd(const AnalyticChannel& left, const AnalyticChannel& right);

// Adds i.i.d. N(0, sigma^2) to every sample and re-wraps.
IpdTrace AddPhaseJitter(const IpdTrace& trace, double sigma_ipd, Rng& rng);
IpdTrace AddPhaseJitter(const IpdTrace& trace, double sigma_ipd,
                        uint64_t seed);

// Mean of |values| over the whole trace. Throws on an empty trace.
double MeanAbsIpd(const IpdTrace& trace);

// arctanh(clamp(cos(m), -1 + eps, 1 - eps)).
double FisherZOfMeanIpd(double mean_abs_ipd, double clamp_epsilon);

// FisherZOfMeanIpd(m) + N(0, sigma_d^2).
double DecisionVariable(double mean_abs_ipd, double sigma_d,
                        double clamp_epsilon, Rng& rng);
double DecisionVariable(double mean_abs_ipd, double sigma_d,
                        double clamp_epsilon, uint64_t seed);

// The full per-interval model with filters designed once. Evaluate() draws
// the jitter samples first and the detector noise last from `rng`.
class IntervalModel {
 public:
  IntervalModel(const PeripheryParams& periphery,
                const BinauralParams& binaural, double sample_rate);

  double Evaluate(const StereoSignal& stereo, Rng& rng) const;

  // Composition of the individual stage functions; kept as the reference
  // for Evaluate(), which fuses the IPD stages into one pass.
  double EvaluateReference(const StereoSignal& stereo, Rng& rng) const;

  // <|dphi|> after jitter, without the decision stage.
  double MeanAbsIpdWithJitter(const StereoSignal& stereo, Rng& rng) const;

  const Periphery& periphery() const { return periphery_; }
  const BinauralParams& binaural() const { return binaural_; }

 private:
  Periphery periphery_;
  BinauralParams binaural_;
};

double ProcessInterval(const StereoSignal& stereo,
                       const PeripheryParams& periphery,
                       const BinauralParams& binaural, uint64_t seed);

}  // namespace bmld

#endif  // BMLD_BINAURAL_H_
