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

#include "bmld/signal.h"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace bmld {

StereoSignal::StereoSignal(RealBuffer l, RealBuffer r, double fs)
    : left(std::move(l)), right(std::move(r)), sample_rate(fs) {
  Validate();
}

void StereoSignal::Validate() const {
  if (left.size() != right.size()) {
    throw std::invalid_argument("StereoSignal: channel lengths differ");
  }
  if (!(sample_rate > 0.0)) {
    throw std::invalid_argument("StereoSignal: sample rate must be positive");
  }
}

double RmsForLevel(double level_db_spl) {
  if (std::isinf(level_db_spl) && level_db_spl < 0) return 0.0;
  return std::pow(10.0, (level_db_spl - kFullScaleDbSpl) / 20.0);
}

double LevelForRms(double rms) {
  return kFullScaleDbSpl + 20.0 * std::log10(rms);
}

double Rms(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return std::sqrt(acc / static_cast<double>(x.size()));
}

size_t SampleCount(double seconds, double sample_rate) {
  return static_cast<size_t>(std::llround(seconds * sample_rate));
}

void ApplyRaisedCosineRamps(std::span<double> x, size_t ramp_samples) {
  if (ramp_samples == 0) return;
  if (2 * ramp_samples > x.size()) {
    throw std::invalid_argument("ramps longer than the signal");
  }
  // Every interval uses the same ramp length; keep the last window around.
  thread_local std::vector<double> window;
  if (window.size() != ramp_samples) {
    window.resize(ramp_samples);
    for (size_t i = 0; i < ramp_samples; ++i) {
      window[i] =
          0.5 * (1.0 - std::cos(std::numbers::pi * static_cast<double>(i) /
                                static_cast<double>(ramp_samples)));
    }
  }
  const size_t n = x.size();
  for (size_t i = 0; i < ramp_samples; ++i) {
    x[i] *= window[i];
    x[n - 1 - i] *= window[i];
  }
}

namespace {

void PutU32(std::ofstream& out, uint32_t v) {
  const char b[4] = {static_cast<char>(v & 0xff),
                     static_cast<char>((v >> 8) & 0xff),
                     static_cast<char>((v >> 16) & 0xff),
                     static_cast<char>((v >> 24) & 0xff)};
  out.write(b, 4);
}

void PutU16(std::ofstream& out, uint16_t v) {
  const char b[2] = {static_cast<char>(v & 0xff),
                     static_cast<char>((v >> 8) & 0xff)};
  out.write(b, 2);
}

}  // namespace

void WriteWavFloat32(const std::string& path, const StereoSignal& signal) {
  signal.Validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  const uint16_t channels = 2;
  const uint16_t bits = 32;
  const uint32_t rate = static_cast<uint32_t>(std::lround(signal.sample_rate));
  const uint32_t data_bytes =
      static_cast<uint32_t>(signal.size() * channels * (bits / 8));
  out.write("RIFF", 4);
  PutU32(out, 36 + data_bytes);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  PutU32(out, 16);
  PutU16(out, 3);  // WAVE_FORMAT_IEEE_FLOAT
  PutU16(out, channels);
  PutU32(out, rate);
  PutU32(out, rate * channels * (bits / 8));
  PutU16(out, channels * (bits / 8));
  PutU16(out, bits);
  out.write("data", 4);
  PutU32(out, data_bytes);
  for (size_t i = 0; i < signal.size(); ++i) {
    const float frame[2] = {static_cast<float>(signal.left[i]),
                            static_cast<float>(signal.right[i])};
    static_assert(sizeof(float) == 4);
    // Little-endian host assumed (x86/ARM).
    out.write(reinterpret_cast<const char*>(frame), sizeof(frame));
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace bmld
