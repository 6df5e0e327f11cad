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

#ifndef BMLD_CONFIG_H_
#define BMLD_CONFIG_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bmld/condition.h"
#include "bmld/observer.h"

namespace bmld {

enum class Experiment {
  kFig3,
  kCorrelation,
  kGroupDelay,
  kTrahiotis,
  kCoherence,
  kStaircaseDemo,
  kStimulusExport,
};

std::string ToString(Experiment e);
std::optional<Experiment> ParseExperiment(const std::string& name);
const std::vector<std::string>& ExperimentNames();

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::optional<Experiment> experiment;
  ModelParams model;
  StaircaseConfig staircase;
  int n_runs = 100;
  uint64_t master_seed = 1;
  std::string output_dir = "out";
  std::string reference_csv;

  // group_delay
  std::vector<double> gd_delays_ms = {0, 1, 2, 3, 4, 5, 6, 7, 7.8};
  std::vector<double> gd_bandwidths_hz = {1000, 50};
  double gd_sigma_ipd = 0.45;
  // trahiotis
  double trahiotis_group_delay_ms = 1.5;
  // correlation
  int corr_trials_per_point = 2000;
  double corr_bandwidth_hz = 1000;
  // coherence
  double coherence_bandwidth_hz = 100;
  double coherence_max_lag_ms = 10;
  double coherence_lag_step_ms = 0.1;
  double coherence_token_s = 10;
  double coherence_delay_ms = 4;
  // staircase_demo and stimulus_export
  double demo_bandwidth_hz = 100;
  double demo_delay_ms = 0;
  bool demo_uncorrelated = false;
  double demo_tone_level_db = 65;
  TonePhase demo_tone_phase = TonePhase::kSPi;
};

// Strict "key = value" parser; '#' starts a comment. Unknown keys,
// malformed or out-of-range values throw ConfigError naming the key and line.
RunConfig ParseConfig(const std::string& text);

// Requires an experiment to be set, either in the text or as `fallback`.
RunConfig ParseConfig(const std::string& text,
                      std::optional<Experiment> fallback);

// Every key with its resolved value, in ParseConfig syntax.
std::string ConfigToText(const RunConfig& config);

// Key list with defaults for --help.
std::string ConfigHelp();

}  // namespace bmld

#endif  // BMLD_CONFIG_H_
