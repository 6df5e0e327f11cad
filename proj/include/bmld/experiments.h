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

#ifndef BMLD_EXPERIMENTS_H_
#define BMLD_EXPERIMENTS_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bmld/condition.h"
#include "bmld/observer.h"
#include "bmld/stimulus.h"

namespace bmld {

inline constexpr double kMainGridBandwidths[] = {25, 50, 100, 150, 200, 1000};
inline constexpr double kMainGridDelaysMs[] = {0, 2, 4, 8};

// Standard masker geometry (500 Hz, 45.5 dB spectrum level, 380 ms) with the
// given bandwidth and interaural mode, and a 300-ms 500-Hz tone.
Condition MakeCondition(double bandwidth_hz, const InterauralMode& mode,
                        TonePhase phase);

// Label such as "BW100_tau4ms_SPi" or "BW25_Nu_SPi".
std::string ConditionLabel(double bandwidth_hz, const InterauralMode& mode,
                           TonePhase phase);

// 6 bandwidths x (4 delays + uncorrelated), S-pi only.
std::vector<Condition> MainGrid();

uint64_t ConditionSeed(uint64_t master_seed, int condition_index);

// Runs every condition with ConditionSeed(master_seed, i). Tracks of all
// conditions are scheduled together on the OpenMP pool.
std::vector<ConditionResult> RunConditions(
    const std::vector<Condition>& conditions, const ModelParams& params,
    const StaircaseConfig& config, int n_runs, uint64_t master_seed);

std::vector<ConditionResult> ReplicateFig3(const ModelParams& params,
                                           const StaircaseConfig& config,
                                           int n_runs, uint64_t master_seed);

// Digitized experimental medians keyed by (bandwidth, delay); the delay key
// is the delay in ms, or nullopt for uncorrelated noise.
struct ReferenceKey {
  double bandwidth_hz = 0.0;
  std::optional<double> delay_ms;
  auto operator<=>(const ReferenceKey&) const = default;
};
using ReferenceTable = std::map<ReferenceKey, double>;

// Columns: bandwidth_hz, delay_ms_or_uncorr, median_threshold_db.
ReferenceTable ReadReferenceCsv(const std::string& path);

std::optional<ReferenceKey> KeyOf(const Condition& condition);

// RMSE of the per-condition simulated medians against the table over the
// conditions present in both. Throws when a result has no reference entry.
double RmseAgainstReference(const std::vector<ConditionResult>& results,
                            const ReferenceTable& reference);

// Scalars quoted in the source publication that the acceptance suite checks
// against, each carrying where it came from.
struct ReferenceScalar {
  double value = 0.0;
  std::string citation;
};
const std::map<std::string, ReferenceScalar>& ReferenceData();

// --- correlation discrimination -------------------------------------------

struct DPrimeEntry {
  double rho1 = 0.0;
  double rho2 = 0.0;
  double dprime = 0.0;
};

struct ChainedEstimate {
  double rho = 0.0;
  std::vector<double> chain;  // rho, ..., 1
  double dprime = 0.0;
};

struct CorrelationDiscriminationResult {
  std::vector<DPrimeEntry> pairs;
  std::vector<ChainedEstimate> chains;
};

std::vector<std::pair<double, double>> DefaultRhoPairs();

// d' = |m1 - m2| / sqrt((v1 + v2) / 2) between decision-variable
// distributions of noise-only intervals.
double DPrime(std::span<const double> a, std::span<const double> b);

// Decision variables of `n` noise-only intervals of Correlated(rho) noise.
std::vector<double> SimulateDecisionVariables(const NoiseSpec& noise,
                                              const ModelParams& params, int n,
                                              uint64_t seed);

CorrelationDiscriminationResult CorrelationDiscrimination(
    const ModelParams& params,
    const std::vector<std::pair<double, double>>& rho_pairs,
    int trials_per_point, double bandwidth_hz, uint64_t seed);

// Every monotone chain rho -> ... -> 1 through the measured pairs.
std::vector<ChainedEstimate> ChainEstimates(
    const std::vector<DPrimeEntry>& pairs);

// --- group delay ------------------------------------------------------------

struct GroupDelayPoint {
  double delay_ms = 0.0;
  ConditionResult result;
  double relative_db = 0.0;  // mean threshold re the zero-delay mean
};

struct GroupDelayStudyResult {
  double bandwidth_hz = 0.0;
  std::vector<GroupDelayPoint> points;
  double slope_db_per_ms = 0.0;  // least squares over all points
};

std::vector<double> DefaultGroupDelaysMs();

// S-pi thresholds in Correlated(1, delay) noise. The first entry of
// delays_ms must be 0.
GroupDelayStudyResult GroupDelayStudy(const ModelParams& params,
                                      const StaircaseConfig& config,
                                      const std::vector<double>& delays_ms,
                                      double bandwidth_hz, int n_runs,
                                      uint64_t seed);

struct TrahiotisResult {
  ConditionResult reference_50;
  ConditionResult delayed_50;
  ConditionResult reference_400;
  ConditionResult delayed_400;
  double delta_50_db = 0.0;
  double delta_400_db = 0.0;
};

TrahiotisResult TrahiotisCheck(const ModelParams& params,
                               const StaircaseConfig& config, int n_runs,
                               uint64_t seed, double group_delay_ms = 1.5);

// --- output -----------------------------------------------------------------

// Columns: label, bandwidth_hz, interaural_mode, tone_phase, n_runs, mean_db,
// median_db, sd_db, sem_db.
void WriteResultsCsv(const std::string& path,
                     const std::vector<ConditionResult>& results);

struct PlotPoint {
  double x = 0.0;
  double y = 0.0;
  std::string series;
};
// Columns: x, y, series.
void WritePlotData(const std::string& path,
                   const std::vector<PlotPoint>& points);

}  // namespace bmld

#endif  // BMLD_EXPERIMENTS_H_
