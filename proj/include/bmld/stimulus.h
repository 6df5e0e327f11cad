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

#ifndef BMLD_STIMULUS_H_
#define BMLD_STIMULUS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>

#include "bmld/signal.h"

namespace bmld {

// Right channel is the left channel delayed by delay_s (integer samples).
struct DelayedNoise {
  double delay_s = 0.0;
};

// Two independent noise tokens.
struct UncorrelatedNoise {};

// right = rho * n1 + sqrt(1 - rho^2) * n2, then a pure group delay
// (zero phase delay at the center frequency) applied to the right channel.
struct CorrelatedNoise {
  double rho = 1.0;
  double group_delay_s = 0.0;
};

using InterauralMode =
    std::variant<DelayedNoise, UncorrelatedNoise, CorrelatedNoise>;

std::string DescribeMode(const InterauralMode& mode);

struct NoiseSpec {
  double center_freq = 500.0;
  double bandwidth = 100.0;
  double spectrum_level_db = 45.5;
  double duration_s = 0.380;
  double ramp_s = 0.020;
  InterauralMode interaural_mode = DelayedNoise{0.0};
  double sample_rate = kDefaultSampleRate;

  void Validate() const;
};

enum class TonePhase { kS0, kSPi };

std::string ToString(TonePhase phase);

struct ToneSpec {
  double freq = 500.0;
  double level_db_spl = 65.0;
  double duration_s = 0.300;
  double ramp_s = 0.020;
  TonePhase phase_mode = TonePhase::kSPi;
  double sample_rate = kDefaultSampleRate;

  void Validate() const;
};

// Length of the circular "mother" noise used for synthesis: the smallest
// period * 2^k covering the gated duration plus the largest delay, where
// period = fs / center_freq when that is an integer (so the center frequency
// falls exactly on a DFT bin), else 1.
size_t MotherNoiseLength(const NoiseSpec& spec);

// Band-limited Gaussian noise pair before gating. Each channel has
// MotherNoiseLength(spec) samples and is exactly periodic in that length.
// Left and right channels are aligned such that a gated segment starting at
// index `MotherGateOffset(spec)` realizes the interaural mode.
StereoSignal GenerateMotherNoise(const NoiseSpec& spec, uint64_t seed);
size_t MotherGateOffset(const NoiseSpec& spec);

// Gated, ramped, calibrated stereo noise token of spec.duration_s.
StereoSignal GenerateBandpassNoise(const NoiseSpec& spec, uint64_t seed);

// Multiplies positive-frequency bins by exp(-i 2 pi (f - center) tau): group
// delay tau at all frequencies, zero phase delay at `center`. The channel is
// treated as one period of a periodic signal.
RealBuffer ApplyGroupDelay(std::span<const double> channel, double tau_s,
                           double center_hz, double sample_rate);

StereoSignal GenerateTone(const ToneSpec& spec);

// Sample index at which a tone of `tone` is placed inside `noise`.
size_t ToneOnsetSample(const NoiseSpec& noise, const ToneSpec& tone);

// Fresh noise token plus the (optional) temporally centered tone.
StereoSignal MakeInterval(const NoiseSpec& noise,
                          const std::optional<ToneSpec>& tone, uint64_t seed);

}  // namespace bmld

#endif  // BMLD_STIMULUS_H_
