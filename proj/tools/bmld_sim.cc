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


// bmld_sim: batch driver for the binaural detection experiments.
//
//   bmld_sim fig3 --out out/fig3 --runs 100
//   bmld_sim coherence --config my.cfg
//
// Every run writes manifest.txt next to its outputs. The manifest is itself a
// valid --config file, so `bmld_sim <experiment> --config manifest.txt`
// regenerates the same bytes.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bmld/coherence.h"
#include "bmld/config.h"
#include "bmld/experiments.h"
#include "bmld/observer.h"
#include "bmld/periphery.h"
#include "bmld/rng.h"
#include "bmld/stimulus.h"
#include "fmt/format.h"

namespace bmld {
namespace {

namespace fs = std::filesystem;

struct CommonFlags {
  std::string config_path;
  std::optional<std::string> out;
  std::optional<uint64_t> seed;
  std::optional<int> runs;
  bool quiet = false;
};

// Collects what a run produced, for the manifest and the console.
class Run {
 public:
  Run(RunConfig config, bool quiet)
      : config_(std::move(config)), quiet_(quiet) {}

  const RunConfig& config() const { return config_; }
  bool quiet() const { return quiet_; }

  std::string Path(const std::string& name) {
    artifacts_.push_back(name);
    return (fs::path(config_.output_dir) / name).string();
  }
  void Seed(const std::string& what, uint64_t seed) {
    seeds_.push_back(fmt::format("# seed {} = {}", what, seed));
  }
  void Note(const std::string& line) { notes_.push_back(line); }
  void Say(const std::string& line) const {
    if (!quiet_) std::printf("%s\n", line.c_str());
  }

  void WriteManifest() {
    const std::string path = Path("manifest.txt");
    std::ofstream out(path);
    out << "# bmld_sim run manifest; usable as --config.\n";
    out << "# math_backend = " << MathBackend() << "\n";
    for (const auto& n : notes_) out << "# " << n << "\n";
    for (const auto& s : seeds_) out << s << "\n";
    for (const auto& a : artifacts_) out << "# artifact " << a << "\n";
    out << ConfigToText(config_);
    if (!out) throw std::runtime_error("cannot write " + path);
  }

 private:
  RunConfig config_;
  bool quiet_;
  std::vector<std::string> artifacts_;
  std::vector<std::string> seeds_;
  std::vector<std::string> notes_;
};

template <typename Row>
void WriteCsv(const std::string& path, const std::string& header,
              const std::vector<Row>& rows,
              const std::function<std::string(const Row&)>& format) {
  std::ofstream out(path);
  out << header << "\n";
  for (const Row& r : rows) out << format(r) << "\n";
  if (!out) throw std::runtime_error("cannot write " + path);
}

void RecordConditionSeeds(Run& run, const std::vector<ConditionResult>& rs,
                          uint64_t seed) {
  for (size_t i = 0; i < rs.size(); ++i) {
    run.Seed(rs[i].condition.label,
             ConditionSeed(seed, static_cast<int>(i)));
  }
}

void WriteThresholds(Run& run, const std::vector<ConditionResult>& rs) {
  struct Row {
    std::string label;
    size_t index;
    uint64_t seed;
    double threshold;
  };
  std::vector<Row> rows;
  for (const auto& r : rs) {
    for (size_t i = 0; i < r.thresholds_db.size(); ++i) {
      rows.push_back({r.condition.label, i, r.track_seeds[i],
                      r.thresholds_db[i]});
    }
  }
  WriteCsv<Row>(run.Path("thresholds.csv"), "label,run,track_seed,threshold_db",
                rows, [](const Row& r) {
                  return fmt::format("{},{},{},{:.6f}", r.label, r.index,
                                     r.seed, r.threshold);
                });
}

void PrintResults(const Run& run, const std::vector<ConditionResult>& rs) {
  for (const auto& r : rs) {
    run.Say(fmt::format("{:<28} mean {:6.2f} dB  median {:6.2f}  sem {:4.2f}",
                        r.condition.label, r.summary.mean, r.summary.median,
                        r.summary.sem));
  }
}

double DelayMs(const InterauralMode& mode) {
  if (const auto* d = std::get_if<DelayedNoise>(&mode)) return d->delay_s * 1e3;
  return std::nan("");
}

// Uncorrelated maskers are drawn at this x position in the fig3 plot data.
constexpr double kUncorrelatedPlotX = 10.0;

void RunFig3(Run& run) {
  const RunConfig& c = run.config();
  run.Say(fmt::format("fig3: 30 conditions x {} tracks", c.n_runs));
  const auto results =
      ReplicateFig3(c.model, c.staircase, c.n_runs, c.master_seed);
  RecordConditionSeeds(run, results, c.master_seed);
  WriteResultsCsv(run.Path("results.csv"), results);
  WriteThresholds(run, results);
  std::vector<PlotPoint> plot;
  for (const auto& r : results) {
    const bool uncorrelated =
        std::holds_alternative<UncorrelatedNoise>(r.condition.noise.interaural_mode);
    plot.push_back(
        {uncorrelated ? kUncorrelatedPlotX
                      : DelayMs(r.condition.noise.interaural_mode),
         r.summary.mean,
         fmt::format("BW{:g}{}", r.condition.noise.bandwidth,
                     uncorrelated ? "_uncorrelated" : "")});
  }
  WritePlotData(run.Path("fig3_plot.csv"), plot);
  PrintResults(run, results);
  if (!c.reference_csv.empty()) {
    const double rmse =
        RmseAgainstReference(results, ReadReferenceCsv(c.reference_csv));
    std::ofstream(run.Path("rmse.txt")) << fmt::format("{:.6f}\n", rmse);
    run.Say(fmt::format("RMSE vs {}: {:.3f} dB", c.reference_csv, rmse));
  }
}

void RunCorrelation(Run& run) {
  const RunConfig& c = run.config();
  const auto pairs = DefaultRhoPairs();
  std::set<double> rhos;
  for (const auto& [a, b] : pairs) {
    rhos.insert(a);
    rhos.insert(b);
  }
  int index = 0;
  for (double rho : rhos) {
    run.Seed(fmt::format("rho{:g}", rho), DeriveSeed(c.master_seed, index++));
  }
  run.Say(fmt::format("correlation: {} rho values x {} intervals",
                      rhos.size(), c.corr_trials_per_point));
  const auto r = CorrelationDiscrimination(
      c.model, pairs, c.corr_trials_per_point, c.corr_bandwidth_hz,
      c.master_seed);
  WriteCsv<DPrimeEntry>(run.Path("dprime.csv"), "rho1,rho2,dprime", r.pairs,
                        [](const DPrimeEntry& e) {
                          return fmt::format("{:g},{:g},{:.6f}", e.rho1,
                                             e.rho2, e.dprime);
                        });
  WriteCsv<ChainedEstimate>(
      run.Path("chains.csv"), "rho,chain,dprime_to_1", r.chains,
      [](const ChainedEstimate& e) {
        std::string chain;
        for (double v : e.chain) {
          chain += (chain.empty() ? "" : ">") + fmt::format("{:g}", v);
        }
        return fmt::format("{:g},{},{:.6f}", e.rho, chain, e.dprime);
      });
  std::vector<PlotPoint> plot;
  for (const auto& e : r.chains) plot.push_back({e.rho, e.dprime, "chained"});
  WritePlotData(run.Path("correlation_plot.csv"), plot);
  for (const auto& e : r.pairs) {
    run.Say(fmt::format("d'({:g}, {:g}) = {:.3f}", e.rho1, e.rho2, e.dprime));
  }
}

void RunGroupDelay(Run& run) {
  const RunConfig& c = run.config();
  ModelParams model = c.model;
  model.binaural.sigma_ipd = c.gd_sigma_ipd;
  std::vector<ConditionResult> all;
  std::vector<GroupDelayStudyResult> studies;
  for (size_t b = 0; b < c.gd_bandwidths_hz.size(); ++b) {
    const uint64_t seed = DeriveSeed(c.master_seed, b);
    run.Say(fmt::format("group_delay: {:g} Hz, {} delays x {} tracks",
                        c.gd_bandwidths_hz[b], c.gd_delays_ms.size(),
                        c.n_runs));
    studies.push_back(GroupDelayStudy(model, c.staircase, c.gd_delays_ms,
                                      c.gd_bandwidths_hz[b], c.n_runs, seed));
    std::vector<ConditionResult> rs;
    for (const auto& p : studies.back().points) rs.push_back(p.result);
    RecordConditionSeeds(run, rs, seed);
    all.insert(all.end(), rs.begin(), rs.end());
  }
  WriteResultsCsv(run.Path("results.csv"), all);
  WriteThresholds(run, all);
  struct Row {
    double bw;
    GroupDelayPoint p;
  };
  std::vector<Row> rows;
  std::vector<PlotPoint> plot;
  for (const auto& s : studies) {
    for (const auto& p : s.points) {
      rows.push_back({s.bandwidth_hz, p});
      plot.push_back({p.delay_ms, p.relative_db,
                      fmt::format("BW{:g}", s.bandwidth_hz)});
    }
  }
  WriteCsv<Row>(run.Path("group_delay.csv"),
                "bandwidth_hz,group_delay_ms,mean_db,relative_db,sem_db", rows,
                [](const Row& r) {
                  return fmt::format("{:g},{:g},{:.6f},{:.6f},{:.6f}", r.bw,
                                     r.p.delay_ms, r.p.result.summary.mean,
                                     r.p.relative_db, r.p.result.summary.sem);
                });
  WriteCsv<GroupDelayStudyResult>(
      run.Path("slopes.csv"), "bandwidth_hz,slope_db_per_ms", studies,
      [](const GroupDelayStudyResult& s) {
        return fmt::format("{:g},{:.6f}", s.bandwidth_hz, s.slope_db_per_ms);
      });
  WritePlotData(run.Path("group_delay_plot.csv"), plot);
  for (const auto& s : studies) {
    run.Say(fmt::format("{:g} Hz: slope {:.3f} dB/ms", s.bandwidth_hz,
                        s.slope_db_per_ms));
  }
}

void RunTrahiotis(Run& run) {
  const RunConfig& c = run.config();
  run.Say(fmt::format("trahiotis: 4 conditions x {} tracks", c.n_runs));
  const auto r = TrahiotisCheck(c.model, c.staircase, c.n_runs, c.master_seed,
                                c.trahiotis_group_delay_ms);
  const std::vector<ConditionResult> all = {r.reference_50, r.delayed_50,
                                            r.reference_400, r.delayed_400};
  RecordConditionSeeds(run, all, c.master_seed);
  WriteResultsCsv(run.Path("results.csv"), all);
  WriteThresholds(run, all);
  struct Row {
    double bw, ref, delayed, delta;
  };
  const std::vector<Row> rows = {
      {50, r.reference_50.summary.mean, r.delayed_50.summary.mean,
       r.delta_50_db},
      {400, r.reference_400.summary.mean, r.delayed_400.summary.mean,
       r.delta_400_db}};
  WriteCsv<Row>(run.Path("trahiotis.csv"),
                "bandwidth_hz,reference_db,delayed_db,delta_db", rows,
                [](const Row& r) {
                  return fmt::format("{:g},{:.6f},{:.6f},{:.6f}", r.bw, r.ref,
                                     r.delayed, r.delta);
                });
  std::vector<PlotPoint> plot;
  for (const auto& row : rows) plot.push_back({row.bw, row.delta, "delta"});
  WritePlotData(run.Path("trahiotis_plot.csv"), plot);
  run.Say(fmt::format("50 Hz: {:+.2f} dB, 400 Hz: {:+.2f} dB", r.delta_50_db,
                      r.delta_400_db));
}

void RunCoherence(Run& run) {
  const RunConfig& c = run.config();
  const auto lags = LagGrid(c.coherence_max_lag_ms * 1e-3,
                            c.coherence_lag_step_ms * 1e-3);
  NoiseSpec noise;
  noise.bandwidth = c.coherence_bandwidth_hz;
  const Psd psd = RectangularPsd(noise.center_freq, noise.bandwidth,
                                 noise.sample_rate / 2.0);
  WriteCoherenceCsv(run.Path("gamma_stimulus.csv"), GammaFromPsd(psd, lags));
  WriteCoherenceCsv(run.Path("gamma_effective.csv"),
                    EffectiveGamma(noise, c.model.periphery, lags));

  NoiseSpec token = noise;
  token.duration_s = c.coherence_token_s;
  token.interaural_mode = DelayedNoise{c.coherence_delay_ms * 1e-3};
  const uint64_t seed = DeriveSeed(c.master_seed, 0);
  run.Seed("coherence_token", seed);
  run.Note(fmt::format(
      "gamma_measured lag l compares left(t + l) with right(t); a token "
      "delayed by {:g} ms therefore shows gamma_stimulus(l + delay)",
      c.coherence_delay_ms));
  const auto measured =
      MeasureCoherence(GenerateBandpassNoise(token, seed), lags);
  WriteCoherenceCsv(run.Path("gamma_measured.csv"), measured);
  for (size_t i = 0; i < lags.size(); ++i) {
    if (std::abs(lags[i]) < 1e-12) {
      run.Say(fmt::format("measured |gamma(0)| = {:.4f}, sinc(B tau) = {:.4f}",
                          std::abs(measured.values[i]),
                          std::abs(Sinc(noise.bandwidth *
                                        c.coherence_delay_ms * 1e-3))));
    }
  }
}

Condition DemoCondition(const RunConfig& c) {
  InterauralMode mode = DelayedNoise{c.demo_delay_ms * 1e-3};
  if (c.demo_uncorrelated) mode = UncorrelatedNoise{};
  return MakeCondition(c.demo_bandwidth_hz, mode, c.demo_tone_phase);
}

void RunStaircaseDemo(Run& run) {
  const RunConfig& c = run.config();
  const Condition condition = DemoCondition(c);
  const ModelObserver observer(condition, c.model);
  const uint64_t seed = TrackSeed(ConditionSeed(c.master_seed, 0), 0);
  run.Seed(condition.label, seed);
  const auto [estimate, log] =
      RunTrackLogged(observer.AsTrialSource(), c.staircase, seed);
  WriteTrialLogCsv(run.Path("trial_log.csv"), log);
  std::vector<PlotPoint> plot;
  for (const auto& t : log) {
    plot.push_back({static_cast<double>(t.index), t.level_db,
                    t.correct ? "correct" : "incorrect"});
  }
  WritePlotData(run.Path("staircase_plot.csv"), plot);
  std::ofstream(run.Path("threshold.txt"))
      << fmt::format("{:.6f}\n", estimate.threshold_db);
  run.Say(fmt::format("{}: threshold {:.2f} dB after {} trials",
                      condition.label, estimate.threshold_db,
                      estimate.n_trials));
}

void RunStimulusExport(Run& run) {
  const RunConfig& c = run.config();
  const Condition condition = DemoCondition(c);
  ToneSpec tone = condition.tone;
  tone.level_db_spl = c.demo_tone_level_db;
  const uint64_t seed = ConditionSeed(c.master_seed, 0);
  run.Seed(condition.label, seed);
  const StereoSignal target = MakeInterval(condition.noise, tone, seed);
  const StereoSignal masker = MakeInterval(condition.noise, std::nullopt, seed);
  WriteWavFloat32(run.Path("target.wav"), target);
  WriteWavFloat32(run.Path("masker.wav"), masker);
  run.Note("WAV samples are float32 with 1.0 RMS = 100 dB SPL");
  run.Say(fmt::format("{}: {} frames at {:g} Hz", condition.label,
                      target.size(), target.sample_rate));
}

int Main(int argc, char** argv) {
  CLI::App app{"Binaural detection model: experiment driver"};
  app.require_subcommand(1);
  app.footer(ConfigHelp());

  CommonFlags flags;
  std::optional<Experiment> chosen;
  for (const std::string& name : ExperimentNames()) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("--config", flags.config_path, "key = value config file")
        ->check(CLI::ExistingFile);
    sub->add_option("--out", flags.out, "output directory (overrides config)");
    sub->add_option("--seed", flags.seed, "master seed (overrides config)");
    sub->add_option("--runs", flags.runs, "tracks per condition (overrides)")
        ->check(CLI::PositiveNumber);
    sub->add_flag("--quiet", flags.quiet, "no console output");
    sub->callback([&chosen, name] { chosen = ParseExperiment(name); });
  }
  CLI11_PARSE(app, argc, argv);

  try {
    std::string text;
    if (!flags.config_path.empty()) {
      std::ifstream in(flags.config_path);
      std::stringstream ss;
      ss << in.rdbuf();
      text = ss.str();
    }
    RunConfig config = ParseConfig(text, chosen);
    if (flags.out) config.output_dir = *flags.out;
    if (flags.seed) config.master_seed = *flags.seed;
    if (flags.runs) config.n_runs = *flags.runs;
    fs::create_directories(config.output_dir);

    Run run(config, flags.quiet);
    switch (*config.experiment) {
      case Experiment::kFig3:
        RunFig3(run);
        break;
      case Experiment::kCorrelation:
        RunCorrelation(run);
        break;
      case Experiment::kGroupDelay:
        RunGroupDelay(run);
        break;
      case Experiment::kTrahiotis:
        RunTrahiotis(run);
        break;
      case Experiment::kCoherence:
        RunCoherence(run);
        break;
      case Experiment::kStaircaseDemo:
        RunStaircaseDemo(run);
        break;
      case Experiment::kStimulusExport:
        RunStimulusExport(run);
        break;
    }
    run.WriteManifest();
    run.Say("wrote " + config.output_dir);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "bmld_sim: %s\n", e.what());
    return 1;
  }
  return 0;
}

}  // namespace
}  // namespace bmld

int main(int argc, char** argv) { return bmld::Main(argc, argv); }
