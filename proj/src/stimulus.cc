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

#include "bmld/stimulus.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <fmt/format.h>
#include <numbers>
#include <random>
#include <stdexcept>

#include "bmld/fft.h"
#include "bmld/rng.h"

namespace bmld {
namespace {

// Shift reserved at the start of the mother noise; covers the main-grid
// delays.
constexpr double kMinDelayReserve_s = 0.008;

// Delays must land on whole samples to within this many samples.
constexpr double kDelayIntegerTolerance = 1e-6;

int64_t DelaySamples(const NoiseSpec& spec) {
  if (const auto* d = std::get_if<DelayedNoise>(&spec.interaural_mode)) {
    return std::llround(d->delay_s * spec.sample_rate);
  }
  return 0;
}

std::complex<double> GroupDelayPhasor(double freq_hz, double tau_s,
                                      double center_hz) {
  return std::polar(1.0,
                    -2.0 * std::numbers::pi * (freq_hz - center_hz) * tau_s);
}

struct BandBins {
  size_t first = 0;
  size_t last = 0;  // inclusive; first > last means empty
};

BandBins RetainedBins(const NoiseSpec& spec, size_t n) {
  const double df = spec.sample_rate / static_cast<double>(n);
  const double lo = spec.center_freq - spec.bandwidth / 2.0;
  const double hi = spec.center_freq + spec.bandwidth / 2.0;
  // Boundary bins are kept; the tolerance absorbs rounding of k * df.
  const double tol = 1e-9;
  auto first = static_cast<size_t>(std::max(1.0, std::ceil(lo / df - tol)));
  auto last = static_cast<size_t>(std::floor(hi / df + tol));
  last = std::min(last, n / 2 - 1);
  return {first, last};
}

// Fills the retained bins with complex Gaussian values whose expected power
// gives the requested spectral density.
ComplexBuffer RandomBandSpectrum(const NoiseSpec& spec, size_t n,
                                 const BandBins& bins, Rng& rng) {
  ComplexBuffer spectrum(n / 2 + 1, {0.0, 0.0});
  const double df = spec.sample_rate / static_cast<double>(n);
  const double density = std::pow(RmsForLevel(spec.spectrum_level_db), 2.0);
  const double scale =
      static_cast<double>(n) * std::sqrt(density * df) / 2.0;
  StandardNormal normal(0.0, 1.0);
  for (size_t k = bins.first; k <= bins.last; ++k) {
    const double re = normal(rng);
    const double im = normal(rng);
    spectrum[k] = {scale * re, scale * im};
  }
  return spectrum;
}

}  // namespace

std::string DescribeMode(const InterauralMode& mode) {
  struct Visitor {
    std::string operator()(const DelayedNoise& d) const {
      return fmt::format("delayed({:g}ms)", d.delay_s * 1e3);
    }
    std::string operator()(const UncorrelatedNoise&) const {
      return "uncorrelated";
    }
    std::string operator()(const CorrelatedNoise& c) const {
      return fmt::format("correlated(rho={:g};group_delay={:g}ms)", c.rho,
                         c.group_delay_s * 1e3);
    }
  };
  return std::visit(Visitor{}, mode);
}

void NoiseSpec::Validate() const {
  if (!(sample_rate > 0.0)) throw std::invalid_argument("sample_rate <= 0");
  if (!(bandwidth > 0.0)) throw std::invalid_argument("bandwidth must be > 0");
  if (center_freq - bandwidth / 2.0 < 0.0) {
    throw std::invalid_argument("pass-band extends below 0 Hz");
  }
  if (center_freq + bandwidth / 2.0 >= sample_rate / 2.0) {
    throw std::invalid_argument("pass-band extends beyond Nyquist");
  }
  if (!(duration_s > 2.0 * ramp_s) || ramp_s < 0.0) {
    throw std::invalid_argument("duration must exceed twice the ramp");
  }
  if (const auto* d = std::get_if<DelayedNoise>(&interaural_mode)) {
    const double samples = d->delay_s * sample_rate;
    if (std::abs(samples - std::round(samples)) > kDelayIntegerTolerance) {
      throw std::invalid_argument(fmt::format(
          "delay {:g} s is not a whole number of samples at {:g} Hz",
          d->delay_s, sample_rate));
    }
  }
  if (const auto* c = std::get_if<CorrelatedNoise>(&interaural_mode)) {
    if (!(c->rho >= -1.0 && c->rho <= 1.0)) {
      throw std::invalid_argument("rho must lie in [-1, 1]");
    }
  }
}

std::string ToString(TonePhase phase) {
  return phase == TonePhase::kS0 ? "S0" : "SPi";
}

void ToneSpec::Validate() const {
  if (!(sample_rate > 0.0)) throw std::invalid_argument("sample_rate <= 0");
  if (!(freq > 0.0 && freq < sample_rate / 2.0)) {
    throw std::invalid_argument("tone frequency out of range");
  }
  if (!(duration_s > 2.0 * ramp_s) || ramp_s < 0.0) {
    throw std::invalid_argument("tone duration must exceed twice the ramp");
  }
}

size_t MotherGateOffset(const NoiseSpec& spec) {
  const auto reserve = static_cast<size_t>(
      std::llround(kMinDelayReserve_s * spec.sample_rate));
  return std::max<size_t>(reserve, std::llabs(DelaySamples(spec)));
}

size_t MotherNoiseLength(const NoiseSpec& spec) {
  const size_t need =
      SampleCount(spec.duration_s, spec.sample_rate) + MotherGateOffset(spec);
  size_t period = 1;
  const double ratio = spec.sample_rate / spec.center_freq;
  if (std::abs(ratio - std::round(ratio)) < 1e-9) {
    period = static_cast<size_t>(std::llround(ratio));
  }
  size_t n = period;
  while (n < need) n *= 2;
  // Even length keeps the DC/Nyquist bookkeeping simple.
  if (n % 2 != 0) n *= 2;
  return n;
}

StereoSignal GenerateMotherNoise(const NoiseSpec& spec, uint64_t seed) {
  spec.Validate();
  const size_t n = MotherNoiseLength(spec);
  const BandBins bins = RetainedBins(spec, n);
  Rng rng = MakeRng(seed);
  const double df = spec.sample_rate / static_cast<double>(n);

  ComplexBuffer first = RandomBandSpectrum(spec, n, bins, rng);
  StereoSignal out;
  out.sample_rate = spec.sample_rate;

  if (std::holds_alternative<DelayedNoise>(spec.interaural_mode)) {
    const int64_t d = DelaySamples(spec);
    out.left = InverseReal(first, n);
    // right[i] = left[(i - d) mod n]: a circular shift of the periodic mother.
    const auto size = static_cast<int64_t>(n);
    const auto shift = static_cast<size_t>(((d % size) + size) % size);
    out.right.resize(n);
    std::rotate_copy(out.left.begin(), out.left.end() - shift, out.left.end(),
                     out.right.begin());
  } else if (std::holds_alternative<UncorrelatedNoise>(spec.interaural_mode)) {
    ComplexBuffer second = RandomBandSpectrum(spec, n, bins, rng);
    out.left = InverseReal(first, n);
    out.right = InverseReal(second, n);
  } else {
    const auto& c = std::get<CorrelatedNoise>(spec.interaural_mode);
    ComplexBuffer second = RandomBandSpectrum(spec, n, bins, rng);
    const double a = c.rho;
    const double b = std::sqrt(std::max(0.0, 1.0 - c.rho * c.rho));
    ComplexBuffer right(first.size(), {0.0, 0.0});
    for (size_t k = bins.first; k <= bins.last; ++k) {
      right[k] = a * first[k] + b * second[k];
      if (c.group_delay_s != 0.0) {
        right[k] *= GroupDelayPhasor(static_cast<double>(k) * df,
                                     c.group_delay_s, spec.center_freq);
      }
    }
    out.left = InverseReal(first, n);
    out.right = InverseReal(right, n);
  }
  return out;
}

StereoSignal GenerateBandpassNoise(const NoiseSpec& spec, uint64_t seed) {
  StereoSignal mother = GenerateMotherNoise(spec, seed);
  const size_t len = SampleCount(spec.duration_s, spec.sample_rate);
  const size_t offset = MotherGateOffset(spec);
  StereoSignal out;
  out.sample_rate = spec.sample_rate;
  out.left.assign(mother.left.begin() + offset,
                  mother.left.begin() + offset + len);
  out.right.assign(mother.right.begin() + offset,
                   mother.right.begin() + offset + len);
  const size_t ramp = SampleCount(spec.ramp_s, spec.sample_rate);
  ApplyRaisedCosineRamps(out.left, ramp);
  ApplyRaisedCosineRamps(out.right, ramp);
  return out;
}

RealBuffer ApplyGroupDelay(std::span<const double> channel, double tau_s,
                           double center_hz, double sample_rate) {
  if (channel.empty()) throw std::invalid_argument("empty channel");
  if (tau_s == 0.0) return RealBuffer(channel.begin(), channel.end());
  const size_t n = channel.size();
  ComplexBuffer bins = ForwardReal(channel);
  const double df = sample_rate / static_cast<double>(n);
  // DC and (for even n) Nyquist must stay real; they are left untouched.
  const size_t last = (n % 2 == 0) ? n / 2 - 1 : n / 2;
  for (size_t k = 1; k <= last; ++k) {
    bins[k] *= GroupDelayPhasor(static_cast<double>(k) * df, tau_s, center_hz);
  }
  return InverseReal(bins, n);
}

StereoSignal GenerateTone(const ToneSpec& spec) {
  spec.Validate();
  const size_t len = SampleCount(spec.duration_s, spec.sample_rate);
  const double amplitude = std::sqrt(2.0) * RmsForLevel(spec.level_db_spl);
  RealBuffer left(len);
  const double w = 2.0 * std::numbers::pi * spec.freq / spec.sample_rate;
  for (size_t i = 0; i < len; ++i) {
    left[i] = amplitude * std::sin(w * static_cast<double>(i));
  }
  ApplyRaisedCosineRamps(left, SampleCount(spec.ramp_s, spec.sample_rate));
  RealBuffer right = left;
  if (spec.phase_mode == TonePhase::kSPi) {
    for (double& v : right) v = -v;
  }
  return StereoSignal(std::move(left), std::move(right), spec.sample_rate);
}

size_t ToneOnsetSample(const NoiseSpec& noise, const ToneSpec& tone) {
  if (tone.duration_s > noise.duration_s) {
    throw std::invalid_argument("tone longer than the noise");
  }
  return SampleCount((noise.duration_s - tone.duration_s) / 2.0,
                     noise.sample_rate);
}

StereoSignal MakeInterval(const NoiseSpec& noise,
                          const std::optional<ToneSpec>& tone, uint64_t seed) {
  StereoSignal out = GenerateBandpassNoise(noise, seed);
  if (!tone) return out;
  if (tone->sample_rate != noise.sample_rate) {
    throw std::invalid_argument("tone and noise sample rates differ");
  }
  const size_t onset = ToneOnsetSample(noise, *tone);
  StereoSignal t = GenerateTone(*tone);
  for (size_t i = 0; i < t.size() && onset + i < out.size(); ++i) {
    out.left[onset + i] += t.left[i];
    out.right[onset + i] += t.right[i];
  }
  return out;
}

}  // namespace bmld
