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


// Runs the bmld_sim binary end to end.

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "bmld/coherence.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"

namespace bmld {
namespace {

namespace fs = std::filesystem;
using ::testing::HasSubstr;

struct Result {
  int status = 0;
  std::string output;
};

Result Sim(const std::string& args) {
  const std::string cmd = std::string(BMLD_SIM_PATH) + " " + args + " 2>&1";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return {-1, "popen failed"};
  std::array<char, 4096> buf;
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) {
    r.output.append(buf.data(), n);
  }
  const int status = pclose(pipe);
  r.status = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("bmld_cli_" +
            std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string Out(const std::string& sub) const { return (dir_ / sub).string(); }

  fs::path dir_;
};

uint32_t U32(const std::string& s, size_t at) {
  uint32_t v = 0;
  std::memcpy(&v, s.data() + at, 4);
  return v;
}

uint16_t U16(const std::string& s, size_t at) {
  uint16_t v = 0;
  std::memcpy(&v, s.data() + at, 2);
  return v;
}

TEST_F(CliTest, StimulusExportWritesFloatWav) {
  const Result r = Sim("stimulus_export --quiet --out " + Out("wav"));
  ASSERT_EQ(r.status, 0) << r.output;
  EXPECT_TRUE(r.output.empty()) << r.output;
  for (const char* name : {"target.wav", "masker.wav"}) {
    const std::string wav = Slurp(dir_ / "wav" / name);
    ASSERT_EQ(wav.size(), 44u + 18240u * 8u) << name;
    EXPECT_EQ(wav.substr(0, 4), "RIFF");
    EXPECT_EQ(U16(wav, 20), 3);
    EXPECT_EQ(U16(wav, 22), 2);
    EXPECT_EQ(U32(wav, 24), 48000u);
    EXPECT_EQ(U32(wav, 40), 18240u * 8u);
  }
  EXPECT_TRUE(fs::exists(dir_ / "wav" / "manifest.txt"));
}

TEST_F(CliTest, CoherenceOutputs) {
  std::ofstream(dir_ / "c.cfg") << "coherence_token_s = 4\n";
  const Result r = Sim("coherence --quiet --config " + (dir_ / "c.cfg").string() +
                       " --out " + Out("coh"));
  ASSERT_EQ(r.status, 0) << r.output;
  std::ifstream in(dir_ / "coh" / "gamma_stimulus.csv");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "lag_s,re,im,abs");
  int rows = 0;
  double abs_at_4ms = -1.0;
  while (std::getline(in, line)) {
    ++rows;
    double lag, re, im, a;
    ASSERT_EQ(std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &lag, &re, &im, &a), 4);
    if (std::abs(lag - 0.004) < 1e-9) abs_at_4ms = a;
  }
  EXPECT_EQ(rows, 101);
  EXPECT_NEAR(abs_at_4ms, 0.7568, 1e-3);
  EXPECT_TRUE(fs::exists(dir_ / "coh" / "gamma_effective.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "coh" / "gamma_measured.csv"));
  const std::string manifest = Slurp(dir_ / "coh" / "manifest.txt");
  EXPECT_THAT(manifest, HasSubstr("experiment = coherence"));
  EXPECT_THAT(manifest, HasSubstr("coherence_token_s = 4"));
  EXPECT_THAT(manifest, HasSubstr("math_backend"));
}

TEST_F(CliTest, Fig3IsReproducible) {
  for (const char* sub : {"a", "b"}) {
    const Result r = Sim("fig3 --quiet --runs 2 --seed 7 --out " + Out(sub));
    ASSERT_EQ(r.status, 0) << r.output;
  }
  const std::string a = Slurp(dir_ / "a" / "results.csv");
  EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 31);
  EXPECT_EQ(a, Slurp(dir_ / "b" / "results.csv"));
  EXPECT_EQ(Slurp(dir_ / "a" / "thresholds.csv"),
            Slurp(dir_ / "b" / "thresholds.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "a" / "fig3_plot.csv"));
}

TEST_F(CliTest, ManifestReproducesRun) {
  const Result first = Sim("staircase_demo --seed 11 --out " + Out("one"));
  ASSERT_EQ(first.status, 0) << first.output;
  EXPECT_FALSE(first.output.empty());
  const Result again = Sim("staircase_demo --quiet --config " +
                           (dir_ / "one" / "manifest.txt").string() +
                           " --out " + Out("two"));
  ASSERT_EQ(again.status, 0) << again.output;
  EXPECT_EQ(Slurp(dir_ / "one" / "trial_log.csv"),
            Slurp(dir_ / "two" / "trial_log.csv"));
  EXPECT_EQ(Slurp(dir_ / "one" / "threshold.txt"),
            Slurp(dir_ / "two" / "threshold.txt"));
  EXPECT_THAT(Slurp(dir_ / "one" / "trial_log.csv"),
              HasSubstr("trial_index,level_db,correct,reversal_flag,step_db"));
}

TEST_F(CliTest, RejectsBadInput) {
  std::ofstream(dir_ / "bad.cfg") << "sigma_ipd = -1\n";
  const Result neg = Sim("fig3 --config " + (dir_ / "bad.cfg").string() +
                         " --out " + Out("x"));
  EXPECT_NE(neg.status, 0);
  EXPECT_THAT(neg.output, HasSubstr("sigma_ipd"));

  std::ofstream(dir_ / "typo.cfg") << "bandwith = 100\n";
  const Result typo = Sim("fig3 --config " + (dir_ / "typo.cfg").string() +
                          " --out " + Out("x"));
  EXPECT_NE(typo.status, 0);
  EXPECT_THAT(typo.output, HasSubstr("bandwith"));

  EXPECT_NE(Sim("").status, 0);
  EXPECT_NE(Sim("fig4").status, 0);
  EXPECT_NE(Sim("fig3 --runs 0").status, 0);
  EXPECT_NE(Sim("fig3 --config /nonexistent.cfg").status, 0);
  const Result help = Sim("--help");
  EXPECT_EQ(help.status, 0);
  EXPECT_THAT(help.output, HasSubstr("staircase_demo"));
}

}  // namespace
}  // namespace bmld
