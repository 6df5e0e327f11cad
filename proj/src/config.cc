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

#include "bmld/config.h"

#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace bmld {
namespace {

struct Field {
  std::string key;
  std::string help;
  // Throws std::invalid_argument with a human-readable reason.
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double ToDouble(const std::string& v) {
  size_t used = 0;
  double d = 0.0;
  try {
    d = std::stod(v, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("'" + v + "' is not a number");
  }
  if (used != v.size() || !std::isfinite(d)) {
    throw std::invalid_argument("'" + v + "' is not a finite number");
  }
  return d;
}

int64_t ToInt(const std::string& v) {
  const double d = ToDouble(v);
  if (d != std::floor(d)) {
    throw std::invalid_argument("'" + v + "' is not an integer");
  }
  return static_cast<int64_t>(d);
}

std::vector<double> ToList(const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(ToDouble(Trim(item)));
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

std::string FromList(const std::vector<double>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) {
    s += (i ? "," : "") + fmt::format("{}", v[i]);
  }
  return s;
}

// Shortest representation that round-trips exactly.
std::string Num(double v) { return fmt::format("{}", v); }

void Require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

// Builds a field for a double member reached through `ref`.
Field RealField(std::string key, std::string help,
                std::function<double&(RunConfig&)> ref,
                std::function<bool(double)> ok, const char* range) {
  return Field{std::move(key), std::move(help),
               [ref, ok, range](RunConfig& c, const std::string& v) {
                 const double d = ToDouble(v);
                 Require(ok(d), range);
                 ref(c) = d;
               },
               [ref](const RunConfig& c) {
                 return Num(ref(const_cast<RunConfig&>(c)));
               }};
}

Field IntField(std::string key, std::string help,
               std::function<int&(RunConfig&)> ref,
               std::function<bool(int64_t)> ok, const char* range) {
  return Field{std::move(key), std::move(help),
               [ref, ok, range](RunConfig& c, const std::string& v) {
                 const int64_t d = ToInt(v);
                 Require(ok(d), range);
                 ref(c) = static_cast<int>(d);
               },
               [ref](const RunConfig& c) {
                 return std::to_string(ref(const_cast<RunConfig&>(c)));
               }};
}

Field ListField(std::string key, std::string help,
                std::function<std::vector<double>&(RunConfig&)> ref,
                std::function<bool(double)> ok, const char* range) {
  return Field{std::move(key), std::move(help),
               [ref, ok, range](RunConfig& c, const std::string& v) {
                 auto list = ToList(v);
                 for (double d : list) Require(ok(d), range);
                 ref(c) = std::move(list);
               },
               [ref](const RunConfig& c) {
                 return FromList(ref(const_cast<RunConfig&>(c)));
               }};
}

const auto kPositive = [](double d) { return d > 0.0; };
const auto kNonNegative = [](double d) { return d >= 0.0; };
const auto kOrder = [](int64_t d) { return d >= 1 && d <= 16; };

const std::vector<Field>& Fields() {
  static const auto* fields = new std::vector<Field>{
      Field{"experiment", "one of: fig3, correlation, group_delay, trahiotis, "
                          "coherence, staircase_demo, stimulus_export",
            [](RunConfig& c, const std::string& v) {
              auto e = ParseExperiment(v);
              Require(e.has_value(), "unknown experiment name");
              c.experiment = e;
            },
            [](const RunConfig& c) {
              return c.experiment ? ToString(*c.experiment) : std::string();
            }},
      IntField("n_runs", "adaptive tracks per condition",
               [](RunConfig& c) -> int& { return c.n_runs; },
               [](int64_t d) { return d >= 1 && d <= 1000000; }, "must be >= 1"),
      Field{"master_seed", "master seed of all random streams",
            [](RunConfig& c, const std::string& v) {
              size_t used = 0;
              uint64_t s = 0;
              try {
                s = std::stoull(v, &used);
              } catch (const std::exception&) {
                used = 0;
              }
              Require(used == v.size() && used > 0 && v[0] != '-',
                      "must be an unsigned 64-bit integer");
              c.master_seed = s;
            },
            [](const RunConfig& c) { return std::to_string(c.master_seed); }},
      Field{"output_dir", "directory receiving all artifacts",
            [](RunConfig& c, const std::string& v) {
              Require(!v.empty(), "must not be empty");
              c.output_dir = v;
            },
            [](const RunConfig& c) { return c.output_dir; }},
      Field{"reference_csv", "optional digitized medians for the RMSE check",
            [](RunConfig& c, const std::string& v) { c.reference_csv = v; },
            [](const RunConfig& c) { return c.reference_csv; }},
      // Periphery.
      IntField("gt_order", "peripheral gammatone order",
               [](RunConfig& c) -> int& { return c.model.periphery.gt_order; },
               kOrder, "must lie in [1, 16]"),
      RealField("gt_center", "peripheral gammatone center (Hz)",
                [](RunConfig& c) -> double& { return c.model.periphery.gt_center; },
                kPositive, "must be > 0"),
      RealField("gt_erb", "peripheral gammatone ERB (Hz)",
                [](RunConfig& c) -> double& { return c.model.periphery.gt_erb; },
                kPositive, "must be > 0"),
      RealField("compression_exponent", "haircell power-law exponent",
                [](RunConfig& c) -> double& {
                  return c.model.periphery.compression_exponent;
                },
                kPositive, "must be > 0"),
      IntField("lp_order", "haircell Butterworth low-pass order",
               [](RunConfig& c) -> int& { return c.model.periphery.lp_order; },
               kOrder, "must lie in [1, 16]"),
      RealField("lp_cutoff", "haircell low-pass cutoff (Hz)",
                [](RunConfig& c) -> double& { return c.model.periphery.lp_cutoff; },
                kPositive, "must be > 0"),
      IntField("tfs_order", "TFS gammatone order",
               [](RunConfig& c) -> int& { return c.model.periphery.tfs_order; },
               kOrder, "must lie in [1, 16]"),
      RealField("tfs_bandwidth", "TFS gammatone ERB (Hz)",
                [](RunConfig& c) -> double& {
                  return c.model.periphery.tfs_bandwidth;
                },
                kPositive, "must be > 0"),
      RealField("tfs_center", "TFS gammatone center (Hz)",
                [](RunConfig& c) -> double& { return c.model.periphery.tfs_center; },
                kPositive, "must be > 0"),
      // Binaural.
      RealField("sigma_ipd", "IPD jitter standard deviation (rad)",
                [](RunConfig& c) -> double& { return c.model.binaural.sigma_ipd; },
                kNonNegative, "must be >= 0"),
      RealField("sigma_d", "detector noise standard deviation",
                [](RunConfig& c) -> double& { return c.model.binaural.sigma_d; },
                kNonNegative, "must be >= 0"),
      RealField("clamp_epsilon", "cosine clamp before arctanh",
                [](RunConfig& c) -> double& {
                  return c.model.binaural.clamp_epsilon;
                },
                [](double d) { return d > 0.0 && d < 1.0; },
                "must lie in (0, 1)"),
      // Staircase.
      RealField("start_level_db", "initial tone level (dB SPL)",
                [](RunConfig& c) -> double& { return c.staircase.start_level_db; },
                [](double) { return true; }, ""),
      RealField("initial_step_db", "initial step size (dB)",
                [](RunConfig& c) -> double& { return c.staircase.initial_step_db; },
                kPositive, "must be > 0"),
      Field{"step_schedule",
            "reversal:step pairs, e.g. 2:2,4:1",
            [](RunConfig& c, const std::string& v) {
              std::vector<std::pair<int, double>> schedule;
              std::stringstream ss(v);
              std::string item;
              while (std::getline(ss, item, ',')) {
                const auto colon = item.find(':');
                Require(colon != std::string::npos,
                        "entries must look like reversal:step");
                const int64_t after = ToInt(Trim(item.substr(0, colon)));
                const double step = ToDouble(Trim(item.substr(colon + 1)));
                Require(after >= 1 && step > 0.0,
                        "reversal must be >= 1 and step > 0");
                schedule.emplace_back(static_cast<int>(after), step);
              }
              c.staircase.step_schedule = std::move(schedule);
            },
            [](const RunConfig& c) {
              std::string s;
              for (const auto& [after, step] : c.staircase.step_schedule) {
                s += (s.empty() ? "" : ",") + fmt::format("{}:{:g}", after, step);
              }
              return s;
            }},
      IntField("total_reversals", "reversals before a track terminates",
               [](RunConfig& c) -> int& { return c.staircase.total_reversals; },
               [](int64_t d) { return d >= 1 && d <= 1000; }, "must be >= 1"),
      IntField("reversals_averaged", "final reversals averaged",
               [](RunConfig& c) -> int& { return c.staircase.reversals_averaged; },
               [](int64_t d) { return d >= 1 && d <= 1000; }, "must be >= 1"),
      IntField("down_count", "correct responses per level decrease",
               [](RunConfig& c) -> int& { return c.staircase.down_count; },
               [](int64_t d) { return d >= 1 && d <= 10; }, "must lie in [1, 10]"),
      IntField("up_count", "incorrect responses per level increase",
               [](RunConfig& c) -> int& { return c.staircase.up_count; },
               [](int64_t d) { return d >= 1 && d <= 10; }, "must lie in [1, 10]"),
      IntField("max_trials", "safety cap on trials per track",
               [](RunConfig& c) -> int& { return c.staircase.max_trials; },
               [](int64_t d) { return d >= 1 && d <= 100000; }, "must be >= 1"),
      // Experiment-specific.
      ListField("gd_delays_ms", "group_delay: delays (ms), first must be 0",
                [](RunConfig& c) -> std::vector<double>& { return c.gd_delays_ms; },
                kNonNegative, "delays must be >= 0"),
      ListField("gd_bandwidths_hz", "group_delay: masker bandwidths (Hz)",
                [](RunConfig& c) -> std::vector<double>& {
                  return c.gd_bandwidths_hz;
                },
                kPositive, "bandwidths must be > 0"),
      RealField("gd_sigma_ipd", "group_delay: IPD jitter (rad)",
                [](RunConfig& c) -> double& { return c.gd_sigma_ipd; },
                kNonNegative, "must be >= 0"),
      RealField("trahiotis_group_delay_ms", "trahiotis: group delay (ms)",
                [](RunConfig& c) -> double& { return c.trahiotis_group_delay_ms; },
                kNonNegative, "must be >= 0"),
      IntField("corr_trials_per_point", "correlation: intervals per rho",
               [](RunConfig& c) -> int& { return c.corr_trials_per_point; },
               [](int64_t d) { return d >= 2 && d <= 10000000; }, "must be >= 2"),
      RealField("corr_bandwidth_hz", "correlation: noise bandwidth (Hz)",
                [](RunConfig& c) -> double& { return c.corr_bandwidth_hz; },
                kPositive, "must be > 0"),
      RealField("coherence_bandwidth_hz", "coherence: noise bandwidth (Hz)",
                [](RunConfig& c) -> double& { return c.coherence_bandwidth_hz; },
                kPositive, "must be > 0"),
      RealField("coherence_max_lag_ms", "coherence: largest lag (ms)",
                [](RunConfig& c) -> double& { return c.coherence_max_lag_ms; },
                kNonNegative, "must be >= 0"),
      RealField("coherence_lag_step_ms", "coherence: lag spacing (ms)",
                [](RunConfig& c) -> double& { return c.coherence_lag_step_ms; },
                kPositive, "must be > 0"),
      RealField("coherence_token_s", "coherence: measured token length (s)",
                [](RunConfig& c) -> double& { return c.coherence_token_s; },
                [](double d) { return d >= 0.1 && d <= 600.0; },
                "must lie in [0.1, 600]"),
      RealField("coherence_delay_ms", "coherence: delay of the measured token",
                [](RunConfig& c) -> double& { return c.coherence_delay_ms; },
                [](double) { return true; }, ""),
      RealField("demo_bandwidth_hz", "demo/export: masker bandwidth (Hz)",
                [](RunConfig& c) -> double& { return c.demo_bandwidth_hz; },
                kPositive, "must be > 0"),
      RealField("demo_delay_ms", "demo/export: masker delay (ms)",
                [](RunConfig& c) -> double& { return c.demo_delay_ms; },
                [](double) { return true; }, ""),
      Field{"demo_uncorrelated", "demo/export: uncorrelated masker (true/false)",
            [](RunConfig& c, const std::string& v) {
              Require(v == "true" || v == "false", "must be true or false");
              c.demo_uncorrelated = v == "true";
            },
            [](const RunConfig& c) {
              return std::string(c.demo_uncorrelated ? "true" : "false");
            }},
      RealField("demo_tone_level_db", "export: tone level (dB SPL)",
                [](RunConfig& c) -> double& { return c.demo_tone_level_db; },
                [](double) { return true; }, ""),
      Field{"demo_tone_phase", "demo/export: S0 or SPi",
            [](RunConfig& c, const std::string& v) {
              Require(v == "S0" || v == "SPi", "must be S0 or SPi");
              c.demo_tone_phase = v == "S0" ? TonePhase::kS0 : TonePhase::kSPi;
            },
            [](const RunConfig& c) { return ToString(c.demo_tone_phase); }},
  };
  return *fields;
}

}  // namespace

std::string ToString(Experiment e) {
  return ExperimentNames()[static_cast<size_t>(e)];
}

const std::vector<std::string>& ExperimentNames() {
  static const auto* names = new std::vector<std::string>{
      "fig3",      "correlation",    "group_delay",    "trahiotis",
      "coherence", "staircase_demo", "stimulus_export"};
  return *names;
}

std::optional<Experiment> ParseExperiment(const std::string& name) {
  const auto& names = ExperimentNames();
  for (size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return static_cast<Experiment>(i);
  }
  return std::nullopt;
}

RunConfig ParseConfig(const std::string& text) {
  RunConfig config;
  std::map<std::string, const Field*> by_key;
  for (const Field& f : Fields()) by_key[f.key] = &f;
  std::set<std::string> seen;

  std::stringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = Trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(
          fmt::format("line {}: expected 'key = value', got '{}'", line_no,
                      line));
    }
    const std::string key = Trim(line.substr(0, eq));
    const std::string value = Trim(line.substr(eq + 1));
    auto it = by_key.find(key);
    if (it == by_key.end()) {
      throw ConfigError(fmt::format("line {}: unknown key '{}'", line_no, key));
    }
    if (!seen.insert(key).second) {
      throw ConfigError(
          fmt::format("line {}: duplicate key '{}'", line_no, key));
    }
    try {
      it->second->set(config, value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(fmt::format("line {}: invalid value for '{}': {}",
                                    line_no, key, e.what()));
    }
  }
  try {
    config.model.Validate();
    config.staircase.Validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(fmt::format("inconsistent parameters: {}", e.what()));
  }
  if (config.gd_delays_ms.front() != 0.0) {
    throw ConfigError("gd_delays_ms must start at 0");
  }
  return config;
}

RunConfig ParseConfig(const std::string& text,
                      std::optional<Experiment> fallback) {
  RunConfig config = ParseConfig(text);
  if (config.experiment && fallback && *config.experiment != *fallback) {
    throw ConfigError(fmt::format(
        "config names experiment '{}' but '{}' was requested",
        ToString(*config.experiment), ToString(*fallback)));
  }
  if (!config.experiment) config.experiment = fallback;
  if (!config.experiment) throw ConfigError("missing experiment name");
  return config;
}

std::string ConfigToText(const RunConfig& config) {
  std::string out;
  for (const Field& f : Fields()) {
    const std::string v = f.get(config);
    if (v.empty()) continue;  // unset optional values
    out += f.key + " = " + v + "\n";
  }
  return out;
}

std::string ConfigHelp() {
  const RunConfig defaults;
  std::string out = "Config keys (key = value, '#' comments):\n";
  for (const Field& f : Fields()) {
    const std::string v = f.get(defaults);
    out += fmt::format("  {:<26} {} [default: {}]\n", f.key, f.help,
                       v.empty() ? "unset" : v);
  }
  return out;
}

}  // namespace bmld
