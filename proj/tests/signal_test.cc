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


#include "bmld/signal.h"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <vector>

#include "gtest/gtest.h"

namespace bmld {
namespace {

TEST(LevelTest, FullScaleIs100DbSpl) {
  EXPECT_DOUBLE_EQ(RmsForLevel(100.0), 1.0);
  EXPECT_NEAR(RmsForLevel(65.0), std::pow(10.0, -35.0 / 20.0), 1e-15);
  EXPECT_NEAR(RmsForLevel(0.0), 1e-5, 1e-20);
  for (double level : {-20.0, 0.0, 45.5, 65.5, 120.0}) {
    EXPECT_NEAR(LevelForRms(RmsForLevel(level)), level, 1e-12);
  }
}

TEST(LevelTest, RmsOfSine) {
  std::vector<double> x(4800);
  for (size_t i = 0; i < x.size(); ++i) {
    x[i] = std::sqrt(2.0) * std::sin(2.0 * M_PI * 500.0 * i / 48000.0);
  }
  EXPECT_NEAR(Rms(x), 1.0, 1e-12);
  EXPECT_EQ(Rms(std::vector<double>{}), 0.0);
}

TEST(SampleCountTest, StandardDurations) {
  EXPECT_EQ(SampleCount(0.380, 48000.0), 18240u);
  EXPECT_EQ(SampleCount(0.300, 48000.0), 14400u);
  EXPECT_EQ(SampleCount(0.040, 48000.0), 1920u);
  EXPECT_EQ(SampleCount(0.008, 48000.0), 384u);
}

TEST(StereoSignalTest, ValidateRejectsMismatch) {
  StereoSignal ok({1, 2}, {3, 4}, 48000.0);
  EXPECT_NO_THROW(ok.Validate());
  StereoSignal bad;
  bad.left = {1, 2, 3};
  bad.right = {1};
  EXPECT_THROW(bad.Validate(), std::invalid_argument);
  StereoSignal bad_rate({1}, {1}, 48000.0);
  bad_rate.sample_rate = 0.0;
  EXPECT_THROW(bad_rate.Validate(), std::invalid_argument);
}

TEST(RampTest, RaisedCosineShape) {
  std::vector<double> x(100, 1.0);
  ApplyRaisedCosineRamps(x, 10);
  EXPECT_EQ(x[0], 0.0);
  EXPECT_EQ(x[99], 0.0);
  EXPECT_NEAR(x[5], 0.5, 1e-15);
  EXPECT_NEAR(x[94], 0.5, 1e-15);
  for (size_t i = 10; i < 90; ++i) EXPECT_EQ(x[i], 1.0);
  for (size_t i = 1; i < 10; ++i) {
    EXPECT_GT(x[i], x[i - 1]);
    EXPECT_EQ(x[i], x[99 - i]);
  }
  std::vector<double> y(10, 1.0);
  EXPECT_THROW(ApplyRaisedCosineRamps(y, 6), std::invalid_argument);
  ApplyRaisedCosineRamps(y, 0);
  EXPECT_EQ(y, std::vector<double>(10, 1.0));
}

template <typename T>
T ReadLe(const std::vector<char>& bytes, size_t offset) {
  T v;
  std::memcpy(&v, bytes.data() + offset, sizeof(T));
  return v;
}

TEST(WavTest, HeaderAndSamples) {
  StereoSignal s;
  s.sample_rate = 48000.0;
  for (int i = 0; i < 18240; ++i) {
    s.left.push_back(0.25 * std::sin(i * 0.01));
    s.right.push_back(-0.5 * std::sin(i * 0.02));
  }
  const auto path =
      (std::filesystem::temp_directory_path() / "bmld_wav_test.wav").string();
  WriteWavFloat32(path, s);
  std::ifstream in(path, std::ios::binary);
  const std::vector<char> b((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
  ASSERT_GE(b.size(), 44u);
  EXPECT_EQ(std::string(b.data(), 4), "RIFF");
  EXPECT_EQ(std::string(b.data() + 8, 4), "WAVE");
  EXPECT_EQ(std::string(b.data() + 12, 4), "fmt ");
  EXPECT_EQ(ReadLe<uint32_t>(b, 16), 16u);
  EXPECT_EQ(ReadLe<uint16_t>(b, 20), 3u);  // IEEE float
  EXPECT_EQ(ReadLe<uint16_t>(b, 22), 2u);
  EXPECT_EQ(ReadLe<uint32_t>(b, 24), 48000u);
  EXPECT_EQ(ReadLe<uint32_t>(b, 28), 48000u * 8u);
  EXPECT_EQ(ReadLe<uint16_t>(b, 32), 8u);
  EXPECT_EQ(ReadLe<uint16_t>(b, 34), 32u);
  EXPECT_EQ(std::string(b.data() + 36, 4), "data");
  const uint32_t data_bytes = ReadLe<uint32_t>(b, 40);
  EXPECT_EQ(data_bytes / 8, 18240u);
  EXPECT_EQ(ReadLe<uint32_t>(b, 4), 36u + data_bytes);
  ASSERT_EQ(b.size(), 44u + data_bytes);
  for (size_t i : {0u, 1u, 777u, 18239u}) {
    EXPECT_EQ(ReadLe<float>(b, 44 + 8 * i), static_cast<float>(s.left[i]));
    EXPECT_EQ(ReadLe<float>(b, 48 + 8 * i), static_cast<float>(s.right[i]));
  }
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace bmld
