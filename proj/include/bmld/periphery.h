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

#ifndef BMLD_PERIPHERY_H_
#define BMLD_PERIPHERY_H_

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "bmld/signal.h"

namespace bmld {

struct PeripheryParams {
  int gt_order = 4;
  double gt_center = 500.0;
  double gt_erb = 79.0;
  double compression_exponent = 0.4;
  int lp_order = 5;
  double lp_cutoff = 770.0;
  int tfs_order = 2;
  // Interpreted as the ERB of the TFS gammatone.
  double tfs_bandwidth = 167.0;
  double tfs_center = 500.0;

  void Validate() const;
};

// Ratio ERB / b for an order-n gammatone with envelope t^(n-1) exp(-2 pi b t):
// pi (2n-2)! 2^-(2n-2) / ((n-1)!)^2.
double GammatoneErbFactor(int order);

// Cascade of `order` identical complex one-pole sections
//   y[k] = gain_per_stage * x[k] + pole * y[k-1]
// with pole = exp(-2 pi b / fs) exp(i 2 pi center / fs) and the stage gains
// chosen such that the complex response at `center` is exactly 1.
struct GammatoneCoefficients {
  int order = 4;
  double center_hz = 500.0;
  double erb_hz = 79.0;
  double decay_hz = 0.0;  // b
  double sample_rate = kDefaultSampleRate;
  std::complex<double> pole;
  double gain_per_stage = 1.0;
};

GammatoneCoefficients DesignGammatone(int order, double center_hz,
                                      double erb_hz, double sample_rate);

// Complex frequency response of the designed cascade at `freq_hz`.
std::complex<double> GammatoneResponse(const GammatoneCoefficients& coeffs,
                                       double freq_hz);

// Causal, zero-initialized application. Output is the complex band-pass
// signal; for a real input the real band-pass waveform is 2 * Re{output}.
ComplexBuffer GammatoneFilter(std::span<const double> x,
                              const GammatoneCoefficients& coeffs);

// Second-order section, transposed direct form II, a0 == 1.
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;
};

// Digital Butterworth low-pass by bilinear transform with pre-warping; each
// section has unit DC gain. Odd orders end with a first-order section
// (b2 = a2 = 0).
std::vector<Biquad> DesignButterworthLowpass(int order, double cutoff_hz,
                                             double sample_rate);

double SectionsResponseMagnitude(std::span<const Biquad> sections,
                                 double freq_hz, double sample_rate);

// Forward-only, zero-initialized cascade. In-place.
void FilterSections(std::span<const Biquad> sections, std::span<double> x);

// Half-wave rectification, power-law compression and low-pass.
class Haircell {
 public:
  Haircell(double compression_exponent, int lp_order, double lp_cutoff_hz,
           double sample_rate);

  RealBuffer Process(std::span<const double> x) const;
  void ProcessInPlace(std::span<double> x) const;
  // Both channels in lock-step; identical to two ProcessInPlace calls.
  void ProcessInPlace(std::span<double> left, std::span<double> right) const;

 private:
  double exponent_;
  std::vector<Biquad> lowpass_;
};

RealBuffer ApplyHaircell(std::span<const double> x,
                         const PeripheryParams& params, double sample_rate);

struct AnalyticChannel {
  ComplexBuffer samples;
  double sample_rate = kDefaultSampleRate;
};

struct PeripheryOutput {
  AnalyticChannel left;
  AnalyticChannel right;
};

// Split real/imaginary stereo output. Buffers are resized on demand, so a
// caller can keep one around and avoid reallocating per interval.
struct PlanarStereo {
  RealBuffer left_re, left_im, right_re, right_im;
  size_t size() const { return left_re.size(); }
};

// Designed once per (params, fs) and reused across intervals.
class Periphery {
 public:
  Periphery(const PeripheryParams& params, double sample_rate);

  // gammatone -> 2 Re -> haircell -> complex TFS gammatone.
  AnalyticChannel Process(std::span<const double> x) const;
  PeripheryOutput Process(const StereoSignal& stereo) const;
  // Filters left and right in lock-step; bitwise equal to Process(stereo).
  void ProcessPlanar(const StereoSignal& stereo, PlanarStereo& out) const;

  const GammatoneCoefficients& peripheral_filter() const { return gt_; }
  const GammatoneCoefficients& tfs_filter() const { return tfs_; }
  double sample_rate() const { return sample_rate_; }

 private:
  double sample_rate_;
  GammatoneCoefficients gt_;
  GammatoneCoefficients tfs_;
  Haircell haircell_;
};

PeripheryOutput ProcessPeriphery(const StereoSignal& stereo,
                                 const PeripheryParams& params);

// "libmvec-avx2" or "libm": which atan2/pow implementation the kernels use.
// The two agree to a few ulp, not bitwise, so manifests record it.
std::string MathBackend();

}  // namespace bmld

#endif  // BMLD_PERIPHERY_H_
