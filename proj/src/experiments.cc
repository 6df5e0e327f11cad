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

#include "bmld/experiments.h"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "bmld/rng.h"
#include "bmld/stats.h"

namespace bmld {

void Condition::Validate() const {
  noise.Validate();
  tone.Validate();
  if (tone.duration_s > noise.duration_s) {
    throw std::invalid_argument("tone longer than masker");
  }
  if (tone.sample_rate != noise.sample_rate) {
    throw std::invalid_argument("tone and masker sample rates differ");
  }
}

void ModelParams::Validate() const {
  periphery.Validate();
  binaural.Validate();
}

std::string ConditionLabel(double bandwidth_hz, const InterauralMode& mode,
                           TonePhase phase) {
  std::string m;
  if (const auto* d = std::get_if<DelayedNoise>(&mode)) {
    m = fmt::format("tau{:g}ms", d->delay_s * 1e3);
  } else if (std::holds_alternative<UncorrelatedNoise>(mode)) {
    m = "Nu";
  } else {
    const auto& c = std::get<CorrelatedNoise>(mode);
    m = fmt::format("rho{:g}_gd{:g}ms", c.rho, c.group_delay_s * 1e3);
  }
  return fmt::format("BW{:g}_{}_{}", bandwidth_hz, m, ToString(phase));
}

Condition MakeCondition(double bandwidth_hz, const InterauralMode& mode,
                        TonePhase phase) {
  Condition c;
  c.noise.bandwidth = bandwidth_hz;
  c.noise.interaural_mode = mode;
  c.tone.phase_mode = phase;
  c.label = ConditionLabel(bandwidth_hz, mode, phase);
  c.Validate();
  return c;
}

std::vector<Condition> MainGrid() {
  std::vector<Condition> grid;
  for (double bw : kMainGridBandwidths) {
    for (double delay_ms : kMainGridDelaysMs) {
      grid.push_back(
          MakeCondition(bw, DelayedNoise{delay_ms * 1e-3}, TonePhase::kSPi));
    }
    grid.push_back(MakeCondition(bw, UncorrelatedNoise{}, TonePhase::kSPi));
  }
  return grid;
}

uint64_t ConditionSeed(uint64_t master_seed, int condition_index) {
  return DeriveSeed(master_seed, static_cast<uint64_t>(condition_index));
}

std::vector<ConditionResult> RunConditions(
    const std::vector<Condition>& conditions, const ModelParams& params,
    const StaircaseConfig& config, int n_runs, uint64_t master_seed) {
  if (n_runs < 1) throw std::invalid_argument("n_runs must be >= 1");
  std::vector<std::unique_ptr<ModelObserver>> observers;
  for (const Condition& c : conditions) {
    observers.push_back(std::make_unique<ModelObserver>(c, params));
  }
  const int n_conditions = static_cast<int>(conditions.size());
  const int total = n_conditions * n_runs;
  std::vector<double> thresholds(total);
  std::exception_ptr error;
  std::mutex error_mu;
#pragma omp parallel for schedule(dynamic, 1)
  for (int job = 0; job < total; ++job) {
    const int ci = job / n_runs;
    const int run = job % n_runs;
    try {
      thresholds[job] =
          RunTrack(observers[ci]->AsTrialSource(), config,
                   TrackSeed(ConditionSeed(master_seed, ci), run))
              .threshold_db;
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mu);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);

  std::vector<ConditionResult> results;
  for (int ci = 0; ci < n_conditions; ++ci) {
    ConditionResult r;
    r.condition = conditions[ci];
    const uint64_t cs = ConditionSeed(master_seed, ci);
    for (int run = 0; run < n_runs; ++run) {
      r.thresholds_db.push_back(thresholds[ci * n_runs + run]);
      r.track_seeds.push_back(TrackSeed(cs, run));
    }
    r.summary = Summarize(r.thresholds_db);
    results.push_back(std::move(r));
  }
  return results;
}

std::vector<ConditionResult> ReplicateFig3(const ModelParams& params,
                                           const StaircaseConfig& config,
                                           int n_runs, uint64_t master_seed) {
  return RunConditions(MainGrid(), params, config, n_runs, master_seed);
}

namespace {

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) {
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    fields.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
  }
  return fields;
}

double ParseNumber(const std::string& text, const std::string& context) {
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    throw std::invalid_argument(
        fmt::format("{}: '{}' is not a number", context, text));
  }
  return v;
}

}  // namespace

ReferenceTable ReadReferenceCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open reference table " + path);
  ReferenceTable table;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto f = SplitCsvLine(line);
    if (!header_seen) {
      header_seen = true;
      if (f.size() != 3 || f[0] != "bandwidth_hz" ||
          f[1] != "delay_ms_or_uncorr" || f[2] != "median_threshold_db") {
        throw std::invalid_argument(path + ": unexpected header");
      }
      continue;
    }
    const std::string ctx = fmt::format("{}:{}", path, line_no);
    if (f.size() != 3) throw std::invalid_argument(ctx + ": need 3 columns");
    ReferenceKey key;
    key.bandwidth_hz = ParseNumber(f[0], ctx);
    if (f[1] != "uncorr") key.delay_ms = ParseNumber(f[1], ctx);
    table[key] = ParseNumber(f[2], ctx);
  }
  return table;
}

std::optional<ReferenceKey> KeyOf(const Condition& condition) {
  ReferenceKey key;
  key.bandwidth_hz = condition.noise.bandwidth;
  if (const auto* d = std::get_if<DelayedNoise>(&condition.noise.interaural_mode)) {
    key.delay_ms = std::round(d->delay_s * 1e6) / 1e3;
    return key;
  }
  if (std::holds_alternative<UncorrelatedNoise>(
          condition.noise.interaural_mode)) {
    return key;
  }
  return std::nullopt;
}

double RmseAgainstReference(const std::vector<ConditionResult>& results,
                            const ReferenceTable& reference) {
  std::vector<double> simulated, measured;
  for (const ConditionResult& r : results) {
    const auto key = KeyOf(r.condition);
    auto it = key ? reference.find(*key) : reference.end();
    if (it == reference.end()) {
      throw std::invalid_argument("no reference entry for " +
                                  r.condition.label);
    }
    simulated.push_back(r.summary.median);
    measured.push_back(it->second);
  }
  return Rmse(simulated, measured);
}

const std::map<std::string, ReferenceScalar>& ReferenceData() {
  static const auto* data = new std::map<std::string, ReferenceScalar>{
      {"sigma_ipd_rad", {0.3, "fitted IPD jitter, main data set"}},
      {"sigma_d", {0.4, "fitted detector noise, main data set"}},
      {"sigma_ipd_group_delay_rad",
       {0.45, "IPD jitter refitted for the short pure-group-delay stimuli"}},
      {"runs_per_condition", {100, "artificial-observer runs per condition"}},
      {"max_sem_db", {0.6, "largest simulated standard error per condition"}},
      {"rmse_db", {1.35, "model vs. measured medians, all S-pi conditions"}},
      {"bmld_tau0_db", {14.8, "measured BMLD without delay, all bandwidths"}},
      {"bmld_tau8_broadband_db",
       {2.0, "measured BMLD at 8 ms for bandwidths >= 100 Hz"}},
      {"group_delay_slope_broadband_db_per_ms",
       {3.0, "upper bound, broadband pure-group-delay threshold slope"}},
      {"group_delay_slope_50hz_db_per_ms",
       {2.0, "50-Hz pure-group-delay threshold slope"}},
      {"group_delay_1p5ms_50hz_db", {2.0, "predicted rise, 50-Hz masker"}},
      {"group_delay_1p5ms_400hz_db", {4.0, "predicted rise, 400-Hz masker"}},
      {"max_underestimate_db",
       {3.0, "largest model underestimate at narrow bandwidths"}},
  };
  return *data;
}

// --- correlation discrimination -------------------------------------------

std::vector<std::pair<double, double>> DefaultRhoPairs() {
  return {{0.0, 0.5}, {0.5, 0.9}, {0.9, 1.0}, {0.0, 0.8},
          {0.8, 1.0}, {0.5, 0.8}, {0.8, 0.9}};
}

double DPrime(std::span<const double> a, std::span<const double> b) {
  const double va = a.size() > 1 ? std::pow(StdDev(a), 2.0) : 0.0;
  const double vb = b.size() > 1 ? std::pow(StdDev(b), 2.0) : 0.0;
  if (!(va + vb > 0.0)) {
    throw std::invalid_argument("d' of zero-variance distributions");
  }
  return std::abs(Mean(a) - Mean(b)) / std::sqrt((va + vb) / 2.0);
}

std::vector<double> SimulateDecisionVariables(const NoiseSpec& noise,
                                              const ModelParams& params, int n,
                                              uint64_t seed) {
  if (n < 1) throw std::invalid_argument("need at least one interval");
  const IntervalModel model(params.periphery, params.binaural,
                            noise.sample_rate);
  std::vector<double> out(n);
  std::exception_ptr error;
  std::mutex error_mu;
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    try {
      const uint64_t s = DeriveSeed(seed, static_cast<uint64_t>(i));
      const StereoSignal stereo = GenerateBandpassNoise(noise, DeriveSeed(s, 0));
      Rng rng = MakeRng(DeriveSeed(s, 1));
      out[i] = model.Evaluate(stereo, rng);
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mu);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

std::vector<ChainedEstimate> ChainEstimates(
    const std::vector<DPrimeEntry>& pairs) {
  // Edges point from the lower to the higher correlation.
  std::map<double, std::vector<std::pair<double, double>>> edges;
  std::set<double> starts;
  for (const DPrimeEntry& e : pairs) {
    const double lo = std::min(e.rho1, e.rho2);
    const double hi = std::max(e.rho1, e.rho2);
    if (lo == hi) continue;
    edges[lo].emplace_back(hi, e.dprime);
    starts.insert(lo);
  }
  std::vector<ChainedEstimate> out;
  for (double start : starts) {
    std::vector<double> path = {start};
    std::function<void(double, double)> walk = [&](double node, double sum) {
      if (node == 1.0) {
        out.push_back({start, path, sum});
        return;
      }
      auto it = edges.find(node);
      if (it == edges.end()) return;
      for (const auto& [next, d] : it->second) {
        path.push_back(next);
        walk(next, sum + d);
        path.pop_back();
      }
    };
    walk(start, 0.0);
  }
  return out;
}

CorrelationDiscriminationResult CorrelationDiscrimination(
    const ModelParams& params,
    const std::vector<std::pair<double, double>>& rho_pairs,
    int trials_per_point, double bandwidth_hz, uint64_t seed) {
  std::set<double> rhos;
  for (const auto& [a, b] : rho_pairs) {
    if (!(a >= -1.0 && a <= 1.0 && b >= -1.0 && b <= 1.0)) {
      throw std::invalid_argument("rho outside [-1, 1]");
    }
    rhos.insert(a);
    rhos.insert(b);
  }
  std::map<double, std::vector<double>> samples;
  int index = 0;
  for (double rho : rhos) {
    Condition c = MakeCondition(bandwidth_hz, CorrelatedNoise{rho, 0.0},
                                TonePhase::kSPi);
    samples[rho] = SimulateDecisionVariables(c.noise, params, trials_per_point,
                                             DeriveSeed(seed, index++));
  }
  CorrelationDiscriminationResult result;
  for (const auto& [a, b] : rho_pairs) {
    DPrimeEntry e{a, b, 0.0};
    if (a != b) e.dprime = DPrime(samples[a], samples[b]);
    result.pairs.push_back(e);
  }
  result.chains = ChainEstimates(result.pairs);
  return result;
}

// --- group delay ------------------------------------------------------------

std::vector<double> DefaultGroupDelaysMs() {
  return {0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 7.8};
}

GroupDelayStudyResult GroupDelayStudy(const ModelParams& params,
                                      const StaircaseConfig& config,
                                      const std::vector<double>& delays_ms,
                                      double bandwidth_hz, int n_runs,
                                      uint64_t seed) {
  if (delays_ms.empty() || delays_ms.front() != 0.0) {
    throw std::invalid_argument("group-delay grid must start at 0");
  }
  std::vector<Condition> conditions;
  for (double d : delays_ms) {
    if (d < 0.0) throw std::invalid_argument("group delays must be >= 0");
    conditions.push_back(MakeCondition(
        bandwidth_hz, CorrelatedNoise{1.0, d * 1e-3}, TonePhase::kSPi));
  }
  auto results = RunConditions(conditions, params, config, n_runs, seed);
  GroupDelayStudyResult out;
  out.bandwidth_hz = bandwidth_hz;
  const double reference = results.front().summary.mean;
  std::vector<double> rel;
  for (size_t i = 0; i < results.size(); ++i) {
    GroupDelayPoint p;
    p.delay_ms = delays_ms[i];
    p.relative_db = results[i].summary.mean - reference;
    p.result = std::move(results[i]);
    rel.push_back(p.relative_db);
    out.points.push_back(std::move(p));
  }
  out.slope_db_per_ms = delays_ms.size() > 1 ? LinearSlope(delays_ms, rel) : 0.0;
  return out;
}

TrahiotisResult TrahiotisCheck(const ModelParams& params,
                               const StaircaseConfig& config, int n_runs,
                               uint64_t seed, double group_delay_ms) {
  const std::vector<Condition> conditions = {
      MakeCondition(50.0, CorrelatedNoise{1.0, 0.0}, TonePhase::kSPi),
      MakeCondition(50.0, CorrelatedNoise{1.0, group_delay_ms * 1e-3},
                    TonePhase::kSPi),
      MakeCondition(400.0, CorrelatedNoise{1.0, 0.0}, TonePhase::kSPi),
      MakeCondition(400.0, CorrelatedNoise{1.0, group_delay_ms * 1e-3},
                    TonePhase::kSPi),
  };
  auto r = RunConditions(conditions, params, config, n_runs, seed);
  TrahiotisResult out;
  out.reference_50 = r[0];
  out.delayed_50 = r[1];
  out.reference_400 = r[2];
  out.delayed_400 = r[3];
  out.delta_50_db = r[1].summary.mean - r[0].summary.mean;
  out.delta_400_db = r[3].summary.mean - r[2].summary.mean;
  return out;
}

// --- output -----------------------------------------------------------------

void WriteResultsCsv(const std::string& path,
                     const std::vector<ConditionResult>& results) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "label,bandwidth_hz,interaural_mode,tone_phase,n_runs,mean_db,"
         "median_db,sd_db,sem_db\n";
  for (const ConditionResult& r : results) {
    out << fmt::format("{},{:g},{},{},{},{:.4f},{:.4f},{:.4f},{:.4f}\n",
                       r.condition.label, r.condition.noise.bandwidth,
                       DescribeMode(r.condition.noise.interaural_mode),
                       ToString(r.condition.tone_phase()), r.summary.n,
                       r.summary.mean, r.summary.median, r.summary.sd,
                       r.summary.sem);
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

void WritePlotData(const std::string& path,
                   const std::vector<PlotPoint>& points) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "x,y,series\n";
  for (const PlotPoint& p : points) {
    out << fmt::format("{:.6g},{:.6g},{}\n", p.x, p.y, p.series);
  }
}

}  // namespace bmld
