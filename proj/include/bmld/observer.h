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

#ifndef BMLD_OBSERVER_H_
#define BMLD_OBSERVER_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bmld/binaural.h"
#include "bmld/condition.h"
#include "bmld/stats.h"

namespace bmld {

struct StaircaseConfig {
  double start_level_db = 65.0;
  double initial_step_db = 4.0;
  // (reversal count after which the step applies, step in dB).
  std::vector<std::pair<int, double>> step_schedule = {{2, 2.0}, {4, 1.0}};
  int total_reversals = 10;
  int reversals_averaged = 6;
  int down_count = 2;
  int up_count = 1;
  int max_trials = 400;

  void Validate() const;
  // Step size in effect once `reversals` reversals have been logged.
  double StepAfter(int reversals) const;
};

enum class Direction { kNone, kUp, kDown };

struct TrialRecord {
  int index = 0;
  double level_db = 0.0;
  bool correct = false;
  bool reversal = false;
  double step_db = 0.0;  // step applied after this trial (0 if none)
};

struct TrackState {
  double current_level_db = 0.0;
  int consecutive_correct = 0;
  int consecutive_incorrect = 0;
  Direction last_direction = Direction::kNone;
  std::vector<double> reversal_levels;
  std::vector<TrialRecord> trial_log;
};

struct ThresholdEstimate {
  double threshold_db = 0.0;
  std::vector<double> reversal_levels;
  int n_trials = 0;
};

// Raised when a track hits StaircaseConfig::max_trials.
class TrackAborted : public std::runtime_error {
 public:
  explicit TrackAborted(const std::string& what) : std::runtime_error(what) {}
};

// Transformed up-down staircase. A reversal is a flip of the direction of the
// applied level change; its level is the level of the trial that caused the
// flip. A scheduled step change already applies to the level change made on
// the reversal trial itself.
class Staircase {
 public:
  explicit Staircase(StaircaseConfig config);

  double level_db() const { return state_.current_level_db; }
  double step_db() const;
  bool terminated() const { return result_.has_value(); }
  const TrackState& state() const { return state_; }
  const StaircaseConfig& config() const { return config_; }

  // Records one response. Returns the estimate once the final reversal is
  // reached. Throws std::logic_error after termination.
  std::optional<ThresholdEstimate> Update(bool correct);

 private:
  StaircaseConfig config_;
  TrackState state_;
  std::optional<ThresholdEstimate> result_;
};

// Returns whether the trial at `level_db` was answered correctly; must be a
// pure function of its arguments.
using TrialSource = std::function<bool(double level_db, uint64_t trial_seed)>;

// 3-AFC trial generator for one condition: three fresh intervals, target
// position uniform, the interval with the smallest decision variable wins.
class ModelObserver {
 public:
  ModelObserver(Condition condition, const ModelParams& params);

  struct TrialOutcome {
    int target_interval = 0;
    int chosen_interval = 0;
    double decision[3] = {0.0, 0.0, 0.0};
    bool correct() const { return target_interval == chosen_interval; }
  };

  TrialOutcome RunTrialDetailed(double level_db, uint64_t trial_seed) const;
  bool RunTrial(double level_db, uint64_t trial_seed) const;

  // Decision variable of a single interval (tone present iff level given).
  double EvaluateInterval(std::optional<double> tone_level_db,
                          uint64_t interval_seed) const;

  TrialSource AsTrialSource() const;

  const Condition& condition() const { return condition_; }

 private:
  Condition condition_;
  IntervalModel model_;
  StereoSignal unit_tone_;  // tone at 0 dB re full scale, placed in the noise
};

ThresholdEstimate RunTrack(const TrialSource& source,
                           const StaircaseConfig& config, uint64_t seed);
ThresholdEstimate RunTrack(const Condition& condition,
                           const ModelParams& params,
                           const StaircaseConfig& config, uint64_t seed);

// Like RunTrack but also returns the trial log.
std::pair<ThresholdEstimate, std::vector<TrialRecord>> RunTrackLogged(
    const TrialSource& source, const StaircaseConfig& config, uint64_t seed);

void WriteTrialLogCsv(const std::string& path,
                      const std::vector<TrialRecord>& log);

struct ConditionResult {
  Condition condition;
  std::vector<double> thresholds_db;
  std::vector<uint64_t> track_seeds;
  Summary summary;
};

uint64_t TrackSeed(uint64_t condition_seed, int run_index);

// n_runs independent tracks; run i uses TrackSeed(seed, i). The OpenMP
// version and the serial reference produce identical results.
std::vector<ThresholdEstimate> RunTracks(const TrialSource& source,
                                         const StaircaseConfig& config,
                                         int n_runs, uint64_t seed);
std::vector<ThresholdEstimate> RunTracksSerial(const TrialSource& source,
                                               const StaircaseConfig& config,
                                               int n_runs, uint64_t seed);

ConditionResult RunCondition(const Condition& condition,
                             const ModelParams& params,
                             const StaircaseConfig& config, int n_runs,
                             uint64_t seed);
ConditionResult RunConditionSerial(const Condition& condition,
                                   const ModelParams& params,
                                   const StaircaseConfig& config, int n_runs,
                                   uint64_t seed);

}  // namespace bmld

#endif  // BMLD_OBSERVER_H_
