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

#ifndef BMLD_CONDITION_H_
#define BMLD_CONDITION_H_

#include <string>

#include "bmld/binaural.h"
#include "bmld/periphery.h"
#include "bmld/stimulus.h"

namespace bmld {

// A masker plus the phase of the target tone. The tone's level is set by the
// adaptive track; everything else comes from `tone`.
struct Condition {
  NoiseSpec noise;
  ToneSpec tone;
  std::string label;

  TonePhase tone_phase() const { return tone.phase_mode; }
  void Validate() const;
};

struct ModelParams {
  PeripheryParams periphery;
  BinauralParams binaural;

  void Validate() const;
};

}  // namespace bmld

#endif  // BMLD_CONDITION_H_
