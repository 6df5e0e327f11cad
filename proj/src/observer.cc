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

#include "bmld/observer.h"

#include <algorithm>
#include <exception>
#include <fstream>
#include <mutex>
#include <random>

#include <fmt/format.h>

#include "bmld/rng.h"
#include "bmld/stimulus.h"

namespace bmld {

void StaircaseConfig::Validate() const {
  if (!(initial_step_db > 0.0)) throw std::invalid_argument("step must be > 0");
  double previous = initial_step_db;
  int previous_after = 0;
  for (const auto& [after, step] : step_schedule) {
    if (!(step > 0.0) || !(step < previous) || after <= previous_after) {
      throw std::invalid_argument(
          "step schedule must be strictly decreasing, positive and ordered");
    }
    previous = step;
    previous_after = after;
  }
  if (total_reversals < 1 || reversals_averaged < 1 ||
      reversals_averaged > total_reversals) {
    throw std::invalid_argument("need 1 <= reversals_averaged <= total");
  }
  if (down_count < 1 || up_count < 1) {
    throw std::invalid_argument("up/down counts must be >= 1");
  }
  if (max_trials < 1) throw std::invalid_argument("max_trials must be >= 1");
}

double StaircaseConfig::StepAfter(int reversals) const {
  double step = initial_step_db;
  for (const auto& [after, s] : step_schedule) {
    if (reversals >= after) step = s;
  }
  return step;
}

Staircase::Staircase(StaircaseConfig config) : config_(std::move(config)) {
  config_.Validate();
  state_.current_level_db = config_.start_level_db;
}

double Staircase::step_db() const {
  return config_.StepAfter(static_cast<int>(state_.reversal_levels.size()));
}

std::optional<ThresholdEstimate> Staircase::Update(bool correct) {
  if (terminated()) {
    throw std::logic_error("staircase updated after termination");
  }
  TrialRecord record;
  record.index = static_cast<int>(state_.trial_log.size());
  record.level_db = state_.current_level_db;
  record.correct = correct;

  Direction move = Direction::kNone;
  if (correct) {
    state_.consecutive_incorrect = 0;
    if (++state_.consecutive_correct == config_.down_count) {
      move = Direction::kDown;
      state_.consecutive_correct = 0;
    }
  } else {
    state_.consecutive_correct = 0;
    if (++state_.consecutive_incorrect == config_.up_count) {
      move = Direction::kUp;
      state_.consecutive_incorrect = 0;
    }
  }

  if (move != Direction::kNone) {
    if (state_.last_direction != Direction::kNone &&
        move != state_.last_direction) {
      record.reversal = true;
      state_.reversal_levels.push_back(state_.current_level_db);
    }
    state_.last_direction = move;
    const int reversals = static_cast<int>(state_.reversal_levels.size());
    if (reversals >= config_.total_reversals) {
      state_.trial_log.push_back(record);
      ThresholdEstimate estimate;
      estimate.reversal_levels = state_.reversal_levels;
      estimate.n_trials = static_cast<int>(state_.trial_log.size());
      const auto tail = std::span<const double>(state_.reversal_levels)
                            .last(config_.reversals_averaged);
      estimate.threshold_db = Mean(tail);
      result_ = estimate;
      return result_;
    }
    record.step_db = config_.StepAfter(reversals);
    state_.current_level_db +=
        move == Direction::kUp ? record.step_db : -record.step_db;
  }
  state_.trial_log.push_back(record);

  if (static_cast<int>(state_.trial_log.size()) >= config_.max_trials) {
    throw TrackAborted(fmt::format(
        "track aborted after {} trials with {} reversals at level {:.2f} dB",
        state_.trial_log.size(), state_.reversal_levels.size(),
        state_.current_level_db));
  }
  return std::nullopt;
}

ModelObserver::ModelObserver(Condition condition, const ModelParams& params)
    : condition_(std::move(condition)),
      model_(params.periphery, params.binaural, condition_.noise.sample_rate) {
  condition_.Validate();
  params.Validate();
  // Unit-RMS tone, scaled per trial by the requested level.
  ToneSpec unit = condition_.tone;
  unit.level_db_spl = kFullScaleDbSpl;
  unit.sample_rate = condition_.noise.sample_rate;
  StereoSignal tone = GenerateTone(unit);
  const size_t onset = ToneOnsetSample(condition_.noise, unit);
  const size_t len =
      SampleCount(condition_.noise.duration_s, condition_.noise.sample_rate);
  unit_tone_.sample_rate = unit.sample_rate;
  unit_tone_.left.assign(len, 0.0);
  unit_tone_.right.assign(len, 0.0);
  for (size_t i = 0; i < tone.size() && onset + i < len; ++i) {
    unit_tone_.left[onset + i] = tone.left[i];
    unit_tone_.right[onset + i] = tone.right[i];
  }
}

double ModelObserver::EvaluateInterval(std::optional<double> tone_level_db,
                                       uint64_t interval_seed) const {
  StereoSignal stereo =
      GenerateBandpassNoise(condition_.noise, DeriveSeed(interval_seed, 0));
  if (tone_level_db) {
    const double a = RmsForLevel(*tone_level_db);
    for (size_t i = 0; i < stereo.size(); ++i) {
      stereo.left[i] += a * unit_tone_.left[i];
      stereo.right[i] += a * unit_tone_.right[i];
    }
  }
  Rng rng = MakeRng(DeriveSeed(interval_seed, 1));
  return model_.Evaluate(stereo, rng);
}

ModelObserver::TrialOutcome ModelObserver::RunTrialDetailed(
    double level_db, uint64_t trial_seed) const {
  TrialOutcome out;
  Rng rng = MakeRng(trial_seed);
  out.target_interval = std::uniform_int_distribution<int>(0, 2)(rng);
  for (int i = 0; i < 3; ++i) {
    out.decision[i] = EvaluateInterval(
        i == out.target_interval ? std::optional<double>(level_db)
                                 : std::nullopt,
        DeriveSeed(trial_seed, static_cast<uint64_t>(i) + 1));
  }
  out.chosen_interval = static_cast<int>(
      std::min_element(std::begin(out.decision), std::end(out.decision)) -
      std::begin(out.decision));
  return out;
}

bool ModelObserver::RunTrial(double level_db, uint64_t trial_seed) const {
  return RunTrialDetailed(level_db, trial_seed).correct();
}

TrialSource ModelObserver::AsTrialSource() const {
  return [this](double level_db, uint64_t seed) {
    return RunTrial(level_db, seed);
  };
}

std::pair<ThresholdEstimate, std::vector<TrialRecord>> RunTrackLogged(
    const TrialSource& source, const StaircaseConfig& config, uint64_t seed) {
  Staircase staircase(config);
  for (uint64_t trial = 0;; ++trial) {
    const bool correct = source(staircase.level_db(), DeriveSeed(seed, trial));
    if (auto estimate = staircase.Update(correct)) {
      return {*estimate, staircase.state().trial_log};
    }
  }
}

ThresholdEstimate RunTrack(const TrialSource& source,
                           const StaircaseConfig& config, uint64_t seed) {
  return RunTrackLogged(source, config, seed).first;
}

ThresholdEstimate RunTrack(const Condition& condition,
                           const ModelParams& params,
                           const StaircaseConfig& config, uint64_t seed) {
  const ModelObserver observer(condition, params);
  return RunTrack(observer.AsTrialSource(), config, seed);
}

void WriteTrialLogCsv(const std::string& path,
                      const std::vector<TrialRecord>& log) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "trial_index,level_db,correct,reversal_flag,step_db\n";
  for (const TrialRecord& r : log) {
    out << fmt::format("{},{:.6g},{},{},{:.6g}\n", r.index, r.level_db,
                       r.correct ? 1 : 0, r.reversal ? 1 : 0, r.step_db);
  }
}

uint64_t TrackSeed(uint64_t condition_seed, int run_index) {
  return DeriveSeed(condition_seed, static_cast<uint64_t>(run_index));
}

std::vector<ThresholdEstimate> RunTracksSerial(const TrialSource& source,
                                               const StaircaseConfig& config,
                                               int n_runs, uint64_t seed) {
  if (n_runs < 1) throw std::invalid_argument("n_runs must be >= 1");
  std::vector<ThresholdEstimate> out;
  out.reserve(n_runs);
  for (int i = 0; i < n_runs; ++i) {
    out.push_back(RunTrack(source, config, TrackSeed(seed, i)));
  }
  return out;
}

std::vector<ThresholdEstimate> RunTracks(const TrialSource& source,
                                         const StaircaseConfig& config,
                                         int n_runs, uint64_t seed) {
  if (n_runs < 1) throw std::invalid_argument("n_runs must be >= 1");
  std::vector<ThresholdEstimate> out(n_runs);
  std::exception_ptr error;
  std::mutex error_mu;
#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < n_runs; ++i) {
    try {
      out[i] = RunTrack(source, config, TrackSeed(seed, i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mu);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

namespace {

ConditionResult Collect(const Condition& condition,
                        const std::vector<ThresholdEstimate>& estimates,
                        uint64_t seed) {
  ConditionResult result;
  result.condition = condition;
  for (size_t i = 0; i < estimates.size(); ++i) {
    result.thresholds_db.push_back(estimates[i].threshold_db);
    result.track_seeds.push_back(TrackSeed(seed, static_cast<int>(i)));
  }
  result.summary = Summarize(result.thresholds_db);
  return result;
}

}  // namespace

ConditionResult RunCondition(const Condition& condition,
                             const ModelParams& params,
                             const StaircaseConfig& config, int n_runs,
                             uint64_t seed) {
  const ModelObserver observer(condition, params);
  return Collect(condition,
                 RunTracks(observer.AsTrialSource(), config, n_runs, seed),
                 seed);
}

ConditionResult RunConditionSerial(const Condition& condition,
                                   const ModelParams& params,
                                   const StaircaseConfig& config, int n_runs,
                                   uint64_t seed) {
  const ModelObserver observer(condition, params);
  return Collect(
      condition,
      RunTracksSerial(observer.AsTrialSource(), config, n_runs, seed), seed);
}

}  // namespace bmld
