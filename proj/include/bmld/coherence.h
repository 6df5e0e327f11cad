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

#ifndef BMLD_COHERENCE_H_
#define BMLD_COHERENCE_H_

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "bmld/periphery.h"
#include "bmld/signal.h"
#include "bmld/stimulus.h"

namespace bmld {

// Complex temporal coherence of an analytic signal, normalized to 1 at lag 0.
struct CoherenceFunction {
  std::vector<double> lags_s;
  ComplexBuffer values;
};

// Power spectral density sampled on a uniform positive-frequency grid.
struct Psd {
  std::vector<double> freqs_hz;
  std::vector<double> density;
};

inline constexpr double kQuadratureSpacingHz = 0.5;

// sin(pi x) / (pi x).
double Sinc(double x);

// Flat density over [center - bw/2, center + bw/2], zero elsewhere, on a grid
// covering [0, max_freq_hz].
Psd RectangularPsd(double center_hz, double bandwidth_hz, double max_freq_hz,
                   double spacing_hz = kQuadratureSpacingHz);

// gamma(tau) = int psd(f) e^{i 2 pi f tau} df / int psd(f) df, trapezoid rule.
CoherenceFunction GammaFromPsd(const Psd& psd, std::span<const double> lags_s);

// Coherence of the noise after the peripheral gammatone:
// psd(f) = rect(f) * |H(f)|^2.
CoherenceFunction EffectiveGamma(const NoiseSpec& noise,
                                 const PeripheryParams& periphery,
                                 std::span<const double> lags_s);

// Same with an explicit filter (used by tests for the all-pass case).
CoherenceFunction EffectiveGamma(const NoiseSpec& noise,
                                 const GammatoneCoefficients* filter,
                                 std::span<const double> lags_s);

// Normalized complex cross-correlation of the analytic signals of the two
// channels: sum z_l(t + lag) conj(z_r(t)) / sqrt(E_l E_r). Lags are rounded to
// whole samples.
CoherenceFunction MeasureCoherence(const StereoSignal& stereo,
                                   std::span<const double> lags_s);

ComplexBuffer AnalyticSignal(std::span<const double> x);

std::vector<double> LagGrid(double max_lag_s, double step_s);

// Columns: lag_s, re, im, abs.
void WriteCoherenceCsv(const std::string& path, const CoherenceFunction& g);

}  // namespace bmld

#endif  // BMLD_COHERENCE_H_
