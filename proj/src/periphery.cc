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

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <type_traits>
#include <vector>

#include "vecmath.h"

namespace bmld {

namespace {

// Runs the same recursion on C independent channels per time step; the
// lanes of Lane<C> are the channels, so for C == 2 both latency-bound chains
// share one set of (SIMD) instructions. Each lane performs exactly the scalar
// operation sequence, so results do not depend on C. Plain arithmetic instead
// of std::complex: without -ffast-math, complex products go through the
// NaN-checking __muldc3 path.
template <size_t C>
struct LaneType;
template <>
struct LaneType<1> {
  using type = double;
};
template <>
struct LaneType<2> {
  using type = double __attribute__((vector_size(16)));
};
template <size_t C>
using Lane = typename LaneType<C>::type;

template <size_t C>
inline Lane<C> Load(const std::array<const double*, C>& x, size_t i) {
  if constexpr (C == 1) {
    return x[0][i];
  } else {
    return Lane<C>{x[0][i], x[1][i]};
  }
}

template <size_t C>
inline void Store(const std::array<double*, C>& x, size_t i, Lane<C> v) {
  if constexpr (C == 1) {
    x[0][i] = v;
  } else {
    x[0][i] = v[0];
    x[1][i] = v[1];
  }
}

// kRealTwice: write only 2 Re{y} into out_re (the real band-pass signal).
// kOrder > 0 fixes the cascade length at compile time so the state lives in
// registers; kOrder == 0 handles any order.
template <size_t C, bool kRealTwice, size_t kOrder>
void GammatoneKernel(const GammatoneCoefficients& c, size_t n,
                     std::array<const double*, C> x,
                     std::array<double*, C> out_re,
                     std::array<double*, C> out_im) {
  using V = Lane<C>;
  const size_t order = kOrder > 0 ? kOrder : static_cast<size_t>(c.order);
  std::conditional_t<(kOrder > 0), std::array<V, kOrder>, std::vector<V>> re{},
      im{};
  if constexpr (kOrder == 0) {
    re.assign(order, V{});
    im.assign(order, V{});
  }
  const V pr = V{} + c.pole.real();
  const V pi = V{} + c.pole.imag();
  const V g = V{} + c.gain_per_stage;
  const V two = V{} + 2.0;
  for (size_t i = 0; i < n; ++i) {
    V vr = Load<C>(x, i);
    V vi = V{};
    for (size_t k = 0; k < order; ++k) {
      const V sr = g * vr + pr * re[k] - pi * im[k];
      const V si = g * vi + pr * im[k] + pi * re[k];
      re[k] = sr;
      im[k] = si;
      vr = sr;
      vi = si;
    }
    if constexpr (kRealTwice) {
      Store<C>(out_re, i, two * vr);
    } else {
      Store<C>(out_re, i, vr);
      Store<C>(out_im, i, vi);
    }
  }
}

template <size_t C, bool kRealTwice>
void GammatoneLockstep(const GammatoneCoefficients& c, size_t n,
                       std::array<const double*, C> x,
                       std::array<double*, C> out_re,
                       std::array<double*, C> out_im) {
  switch (c.order) {
    case 1:
      return GammatoneKernel<C, kRealTwice, 1>(c, n, x, out_re, out_im);
    case 2:
      return GammatoneKernel<C, kRealTwice, 2>(c, n, x, out_re, out_im);
    case 3:
      return GammatoneKernel<C, kRealTwice, 3>(c, n, x, out_re, out_im);
    case 4:
      return GammatoneKernel<C, kRealTwice, 4>(c, n, x, out_re, out_im);
    case 5:
      return GammatoneKernel<C, kRealTwice, 5>(c, n, x, out_re, out_im);
    case 6:
      return GammatoneKernel<C, kRealTwice, 6>(c, n, x, out_re, out_im);
    default:
      return GammatoneKernel<C, kRealTwice, 0>(c, n, x, out_re, out_im);
  }
}

// All sections advance within one time step, so their recursions overlap
// instead of running as separate latency-bound passes. kSections == 0 falls
// back to one pass per section. The arithmetic is the same either way.
template <size_t C, size_t kSections>
void SectionsKernel(std::span<const Biquad> sections, size_t n,
                    std::array<double*, C> x) {
  using V = Lane<C>;
  std::array<const double*, C> in;
  for (size_t ch = 0; ch < C; ++ch) in[ch] = x[ch];
  if constexpr (kSections == 0) {
    for (const Biquad& s : sections) {
      SectionsKernel<C, 1>(std::span<const Biquad>(&s, 1), n, x);
    }
  } else {
    std::array<V, kSections> b0, b1, b2, a1, a2, s1{}, s2{};
    for (size_t k = 0; k < kSections; ++k) {
      b0[k] = V{} + sections[k].b0;
      b1[k] = V{} + sections[k].b1;
      b2[k] = V{} + sections[k].b2;
      a1[k] = V{} + sections[k].a1;
      a2[k] = V{} + sections[k].a2;
    }
    for (size_t i = 0; i < n; ++i) {
      V v = Load<C>(in, i);
      for (size_t k = 0; k < kSections; ++k) {
        const V out = b0[k] * v + s1[k];
        s1[k] = b1[k] * v - a1[k] * out + s2[k];
        s2[k] = b2[k] * v - a2[k] * out;
        v = out;
      }
      Store<C>(x, i, v);
    }
  }
}

template <size_t C>
void SectionsLockstep(std::span<const Biquad> sections, size_t n,
                      std::array<double*, C> x) {
  switch (sections.size()) {
    case 0:
      return;
    case 1:
      return SectionsKernel<C, 1>(sections, n, x);
    case 2:
      return SectionsKernel<C, 2>(sections, n, x);
    case 3:
      return SectionsKernel<C, 3>(sections, n, x);
    case 4:
      return SectionsKernel<C, 4>(sections, n, x);
    default:
      return SectionsKernel<C, 0>(sections, n, x);
  }
}

}  // namespace

void PeripheryParams::Validate() const {
  if (gt_order < 1 || lp_order < 1 || tfs_order < 1) {
    throw std::invalid_argument("filter orders must be >= 1");
  }
  if (!(gt_center > 0 && gt_erb > 0 && lp_cutoff > 0 && tfs_bandwidth > 0 &&
        tfs_center > 0)) {
    throw std::invalid_argument("bandwidths and frequencies must be > 0");
  }
  if (!(compression_exponent > 0)) {
    throw std::invalid_argument("compression exponent must be > 0");
  }
}

double GammatoneErbFactor(int order) {
  const double n = order;
  // pi * (2n-2)! * 2^-(2n-2) / ((n-1)!)^2, via lgamma for large orders.
  const double log_value = std::lgamma(2.0 * n - 1.0) -
                           (2.0 * n - 2.0) * std::numbers::ln2 -
                           2.0 * std::lgamma(n);
  return std::numbers::pi * std::exp(log_value);
}

GammatoneCoefficients DesignGammatone(int order, double center_hz,
                                      double erb_hz, double sample_rate) {
  if (order < 1) throw std::invalid_argument("gammatone order must be >= 1");
  if (!(erb_hz > 0.0)) throw std::invalid_argument("ERB must be > 0");
  if (!(center_hz > 0.0 && center_hz < sample_rate / 2.0)) {
    throw std::invalid_argument("gammatone center must be in (0, fs/2)");
  }
  GammatoneCoefficients c;
  c.order = order;
  c.center_hz = center_hz;
  c.erb_hz = erb_hz;
  c.sample_rate = sample_rate;
  c.decay_hz = erb_hz / GammatoneErbFactor(order);
  const double radius = std::exp(-2.0 * std::numbers::pi * c.decay_hz /
                                 sample_rate);
  c.pole = std::polar(radius, 2.0 * std::numbers::pi * center_hz / sample_rate);
  // Each stage has response (1 - r) / (1 - r e^{i(wc - w)}), i.e. 1 at wc.
  c.gain_per_stage = 1.0 - radius;
  return c;
}

std::complex<double> GammatoneResponse(const GammatoneCoefficients& c,
                                       double freq_hz) {
  const double w = 2.0 * std::numbers::pi * freq_hz / c.sample_rate;
  const std::complex<double> stage =
      c.gain_per_stage / (1.0 - c.pole * std::polar(1.0, -w));
  return std::pow(stage, c.order);
}

ComplexBuffer GammatoneFilter(std::span<const double> x,
                              const GammatoneCoefficients& c) {
  RealBuffer re(x.size()), im(x.size());
  GammatoneLockstep<1, false>(c, x.size(), {x.data()}, {re.data()},
                              {im.data()});
  ComplexBuffer y(x.size());
  for (size_t i = 0; i < y.size(); ++i) y[i] = {re[i], im[i]};
  return y;
}

std::vector<Biquad> DesignButterworthLowpass(int order, double cutoff_hz,
                                             double sample_rate) {
  if (order < 1) throw std::invalid_argument("Butterworth order must be >= 1");
  if (!(cutoff_hz > 0.0 && cutoff_hz < sample_rate / 2.0)) {
    throw std::invalid_argument("cutoff must be in (0, fs/2)");
  }
  const double fs2 = 2.0 * sample_rate;
  const double warped = fs2 * std::tan(std::numbers::pi * cutoff_hz /
                                       sample_rate);
  std::vector<Biquad> sections;
  for (int k = 0; k < order / 2; ++k) {
    const double theta =
        std::numbers::pi * (2.0 * k + order + 1.0) / (2.0 * order);
    const std::complex<double> p = std::polar(warped, theta);
    const std::complex<double> z = (fs2 + p) / (fs2 - p);
    Biquad s;
    s.a1 = -2.0 * z.real();
    s.a2 = std::norm(z);
    const double gain = (1.0 + s.a1 + s.a2) / 4.0;
    s.b0 = gain;
    s.b1 = 2.0 * gain;
    s.b2 = gain;
    sections.push_back(s);
  }
  if (order % 2 == 1) {
    const double z = (fs2 - warped) / (fs2 + warped);
    Biquad s;
    s.a1 = -z;
    const double gain = (1.0 + s.a1) / 2.0;
    s.b0 = gain;
    s.b1 = gain;
    sections.push_back(s);
  }
  return sections;
}

double SectionsResponseMagnitude(std::span<const Biquad> sections,
                                 double freq_hz, double sample_rate) {
  const std::complex<double> z1 =
      std::polar(1.0, -2.0 * std::numbers::pi * freq_hz / sample_rate);
  const std::complex<double> z2 = z1 * z1;
  std::complex<double> h(1.0, 0.0);
  for (const Biquad& s : sections) {
    h *= (s.b0 + s.b1 * z1 + s.b2 * z2) / (1.0 + s.a1 * z1 + s.a2 * z2);
  }
  return std::abs(h);
}

void FilterSections(std::span<const Biquad> sections, std::span<double> x) {
  SectionsLockstep<1>(sections, x.size(), {x.data()});
}

Haircell::Haircell(double compression_exponent, int lp_order,
                   double lp_cutoff_hz, double sample_rate)
    : exponent_(compression_exponent),
      lowpass_(DesignButterworthLowpass(lp_order, lp_cutoff_hz, sample_rate)) {}

void Haircell::ProcessInPlace(std::span<double> x) const {
  internal::HalfWavePowInPlace(x, exponent_);
  FilterSections(lowpass_, x);
}

void Haircell::ProcessInPlace(std::span<double> left,
                              std::span<double> right) const {
  if (left.size() != right.size()) {
    throw std::invalid_argument("haircell: channel lengths differ");
  }
  internal::HalfWavePowInPlace(left, exponent_);
  internal::HalfWavePowInPlace(right, exponent_);
  SectionsLockstep<2>(lowpass_, left.size(), {left.data(), right.data()});
}

RealBuffer Haircell::Process(std::span<const double> x) const {
  RealBuffer y(x.begin(), x.end());
  ProcessInPlace(y);
  return y;
}

RealBuffer ApplyHaircell(std::span<const double> x,
                         const PeripheryParams& params, double sample_rate) {
  return Haircell(params.compression_exponent, params.lp_order,
                  params.lp_cutoff, sample_rate)
      .Process(x);
}

Periphery::Periphery(const PeripheryParams& params, double sample_rate)
    : sample_rate_(sample_rate),
      gt_(DesignGammatone(params.gt_order, params.gt_center, params.gt_erb,
                          sample_rate)),
      tfs_(DesignGammatone(params.tfs_order, params.tfs_center,
                           params.tfs_bandwidth, sample_rate)),
      haircell_(params.compression_exponent, params.lp_order,
                params.lp_cutoff, sample_rate) {
  params.Validate();
}

AnalyticChannel Periphery::Process(std::span<const double> x) const {
  RealBuffer real(x.size());
  GammatoneLockstep<1, true>(gt_, x.size(), {x.data()}, {real.data()}, {});
  haircell_.ProcessInPlace(real);
  return {GammatoneFilter(real, tfs_), sample_rate_};
}

void Periphery::ProcessPlanar(const StereoSignal& stereo,
                              PlanarStereo& out) const {
  stereo.Validate();
  if (stereo.sample_rate != sample_rate_) {
    throw std::invalid_argument("periphery designed for a different rate");
  }
  const size_t n = stereo.size();
  // The TFS stage reads the haircell output from *_im and overwrites it.
  out.left_re.resize(n);
  out.left_im.resize(n);
  out.right_re.resize(n);
  out.right_im.resize(n);
  GammatoneLockstep<2, true>(gt_, n, {stereo.left.data(), stereo.right.data()},
                             {out.left_im.data(), out.right_im.data()}, {});
  haircell_.ProcessInPlace(out.left_im, out.right_im);
  GammatoneLockstep<2, false>(
      tfs_, n, {out.left_im.data(), out.right_im.data()},
      {out.left_re.data(), out.right_re.data()},
      {out.left_im.data(), out.right_im.data()});
}

PeripheryOutput Periphery::Process(const StereoSignal& stereo) const {
  PlanarStereo planar;
  ProcessPlanar(stereo, planar);
  PeripheryOutput out;
  out.left.sample_rate = out.right.sample_rate = sample_rate_;
  out.left.samples.resize(planar.size());
  out.right.samples.resize(planar.size());
  for (size_t i = 0; i < planar.size(); ++i) {
    out.left.samples[i] = {planar.left_re[i], planar.left_im[i]};
    out.right.samples[i] = {planar.right_re[i], planar.right_im[i]};
  }
  return out;
}

PeripheryOutput ProcessPeriphery(const StereoSignal& stereo,
                                 const PeripheryParams& params) {
  return Periphery(params, stereo.sample_rate).Process(stereo);
}

std::string MathBackend() {
  return internal::VectorMathEnabled() ? "libmvec-avx2" : "libm";
}

}  // namespace bmld
