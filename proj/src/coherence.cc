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

#include "bmld/coherence.h"

#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

#include "bmld/fft.h"

namespace bmld {

double Sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

Psd RectangularPsd(double center_hz, double bandwidth_hz, double max_freq_hz,
                   double spacing_hz) {
  if (!(spacing_hz > 0.0) || !(max_freq_hz > 0.0)) {
    throw std::invalid_argument("bad frequency grid");
  }
  const double lo = center_hz - bandwidth_hz / 2.0;
  const double hi = center_hz + bandwidth_hz / 2.0;
  const auto n = static_cast<size_t>(std::ceil(max_freq_hz / spacing_hz)) + 1;
  Psd psd;
  psd.freqs_hz.resize(n);
  psd.density.resize(n);
  const double tol = 1e-9 * spacing_hz;
  for (size_t j = 0; j < n; ++j) {
    const double f = static_cast<double>(j) * spacing_hz;
    psd.freqs_hz[j] = f;
    double d = 0.0;
    if (f > lo + tol && f < hi - tol) {
      d = 1.0;
    } else if (std::abs(f - lo) <= tol || std::abs(f - hi) <= tol) {
      // Mid-value at a jump keeps the trapezoid rule second-order accurate.
      d = 0.5;
    }
    psd.density[j] = d;
  }
  return psd;
}

CoherenceFunction GammaFromPsd(const Psd& psd, std::span<const double> lags_s) {
  const size_t n = psd.freqs_hz.size();
  if (n < 2 || psd.density.size() != n) {
    throw std::invalid_argument("PSD needs >= 2 aligned grid points");
  }
  std::vector<double> weights(n);
  double total = 0.0;
  for (size_t j = 0; j < n; ++j) {
    if (psd.density[j] < 0.0) throw std::invalid_argument("negative PSD");
    const double left = j > 0 ? psd.freqs_hz[j] - psd.freqs_hz[j - 1] : 0.0;
    const double right =
        j + 1 < n ? psd.freqs_hz[j + 1] - psd.freqs_hz[j] : 0.0;
    weights[j] = 0.5 * (left + right) * psd.density[j];
    total += weights[j];
  }
  if (!(total > 0.0)) throw std::invalid_argument("PSD is identically zero");

  CoherenceFunction g;
  g.lags_s.assign(lags_s.begin(), lags_s.end());
  g.values.reserve(lags_s.size());
  for (double tau : lags_s) {
    std::complex<double> acc(0.0, 0.0);
    if (tau == 0.0) {
      g.values.emplace_back(1.0, 0.0);
      continue;
    }
    for (size_t j = 0; j < n; ++j) {
      if (weights[j] == 0.0) continue;
      acc += weights[j] *
             std::polar(1.0, 2.0 * std::numbers::pi * psd.freqs_hz[j] * tau);
    }
    g.values.push_back(acc / total);
  }
  return g;
}

CoherenceFunction EffectiveGamma(const NoiseSpec& noise,
                                 const GammatoneCoefficients* filter,
                                 std::span<const double> lags_s) {
  noise.Validate();
  Psd psd = RectangularPsd(noise.center_freq, noise.bandwidth,
                           noise.center_freq + noise.bandwidth / 2.0 + 1.0);
  if (filter != nullptr) {
    for (size_t j = 0; j < psd.freqs_hz.size(); ++j) {
      if (psd.density[j] == 0.0) continue;
      psd.density[j] *= std::norm(GammatoneResponse(*filter, psd.freqs_hz[j]));
    }
  }
  return GammaFromPsd(psd, lags_s);
}

CoherenceFunction EffectiveGamma(const NoiseSpec& noise,
                                 const PeripheryParams& periphery,
                                 std::span<const double> lags_s) {
  const GammatoneCoefficients gt =
      DesignGammatone(periphery.gt_order, periphery.gt_center,
                      periphery.gt_erb, noise.sample_rate);
  return EffectiveGamma(noise, &gt, lags_s);
}

ComplexBuffer AnalyticSignal(std::span<const double> x) {
  const size_t n = x.size();
  ComplexBuffer z(x.begin(), x.end());
  ComplexBuffer spec = ForwardComplex(z);
  // Keep DC (and Nyquist for even n), double positive, drop negative.
  for (size_t k = 1; k < n; ++k) {
    if (2 * k < n) {
      spec[k] *= 2.0;
    } else if (2 * k > n) {
      spec[k] = 0.0;
    }
  }
  return InverseComplex(spec);
}

CoherenceFunction MeasureCoherence(const StereoSignal& stereo,
                                   std::span<const double> lags_s) {
  stereo.Validate();
  const ComplexBuffer zl = AnalyticSignal(stereo.left);
  const ComplexBuffer zr = AnalyticSignal(stereo.right);
  double el = 0.0, er = 0.0;
  for (size_t i = 0; i < zl.size(); ++i) {
    el += std::norm(zl[i]);
    er += std::norm(zr[i]);
  }
  if (!(el > 0.0) || !(er > 0.0)) {
    throw std::invalid_argument("coherence of a zero-energy channel");
  }
  const double norm = std::sqrt(el * er);
  const auto n = static_cast<int64_t>(zl.size());
  CoherenceFunction g;
  g.lags_s.assign(lags_s.begin(), lags_s.end());
  for (double lag : lags_s) {
    const int64_t l = std::llround(lag * stereo.sample_rate);
    std::complex<double> acc(0.0, 0.0);
    const int64_t begin = std::max<int64_t>(0, -l);
    const int64_t end = std::min<int64_t>(n, n - l);
    for (int64_t t = begin; t < end; ++t) acc += zl[t + l] * std::conj(zr[t]);
    g.values.push_back(acc / norm);
  }
  return g;
}

std::vector<double> LagGrid(double max_lag_s, double step_s) {
  if (!(step_s > 0.0) || max_lag_s < 0.0) {
    throw std::invalid_argument("bad lag grid");
  }
  std::vector<double> lags;
  const auto n = static_cast<int64_t>(std::floor(max_lag_s / step_s + 1e-9));
  for (int64_t i = 0; i <= n; ++i) lags.push_back(static_cast<double>(i) * step_s);
  return lags;
}

void WriteCoherenceCsv(const std::string& path, const CoherenceFunction& g) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "lag_s,re,im,abs\n";
  for (size_t i = 0; i < g.lags_s.size(); ++i) {
    out << fmt::format("{:.9g},{:.12g},{:.12g},{:.12g}\n", g.lags_s[i],
                       g.values[i].real(), g.values[i].imag(),
                       std::abs(g.values[i]));
  }
}

}  // namespace bmld
