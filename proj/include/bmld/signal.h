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

#ifndef BMLD_SIGNAL_H_
#define BMLD_SIGNAL_H_

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace bmld {

inline constexpr double kDefaultSampleRate = 48000.0;

// Digital RMS amplitude 1.0 corresponds to this sound pressure level.
inline constexpr double kFullScaleDbSpl = 100.0;

using RealBuffer = std::vector<double>;
using ComplexBuffer = std::vector<std::complex<double>>;

// Left/right pressure waveforms at a common sample rate.
struct StereoSignal {
  RealBuffer left;
  RealBuffer right;
  double sample_rate = kDefaultSampleRate;

  StereoSignal() = default;
  StereoSignal(RealBuffer l, RealBuffer r, double fs);

  size_t size() const { return left.size(); }
  void Validate() const;
};

// RMS amplitude for a level in dB SPL under the fixed calibration; -inf maps
// to 0.
double RmsForLevel(double level_db_spl);
double LevelForRms(double rms);

double Rms(std::span<const double> x);

// Number of samples for a duration, rounded to the nearest integer.
size_t SampleCount(double seconds, double sample_rate);

// Multiplies the first and last ramp_samples by a raised-cosine on/off ramp.
void ApplyRaisedCosineRamps(std::span<double> x, size_t ramp_samples);

// RIFF/WAVE, IEEE float32, two channels interleaved.
void WriteWavFloat32(const std::string& path, const StereoSignal& signal);

}  // namespace bmld

#endif  // BMLD_SIGNAL_H_
