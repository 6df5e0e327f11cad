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

#include <benchmark/benchmark.h>

#include "bmld/binaural.h"
#include "bmld/experiments.h"
#include "bmld/observer.h"
#include "bmld/stimulus.h"

namespace bmld {
namespace {

Condition BenchCondition() {
  return MakeCondition(100.0, DelayedNoise{0.004}, TonePhase::kSPi);
}

void BM_GenerateNoise(benchmark::State& state) {
  const Condition c = BenchCondition();
  uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(GenerateBandpassNoise(c.noise, ++seed));
  }
}
BENCHMARK(BM_GenerateNoise);

void BM_Periphery(benchmark::State& state) {
  const Condition c = BenchCondition();
  const StereoSignal s = GenerateBandpassNoise(c.noise, 1);
  const Periphery periphery(PeripheryParams{}, s.sample_rate);
  for (auto _ : state) benchmark::DoNotOptimize(periphery.Process(s));
}
BENCHMARK(BM_Periphery);

void BM_IntervalFused(benchmark::State& state) {
  const Condition c = BenchCondition();
  const StereoSignal s = GenerateBandpassNoise(c.noise, 1);
  const IntervalModel model(PeripheryParams{}, BinauralParams{}, s.sample_rate);
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(model.Evaluate(s, rng));
}
BENCHMARK(BM_IntervalFused);

void BM_IntervalReference(benchmark::State& state) {
  const Condition c = BenchCondition();
  const StereoSignal s = GenerateBandpassNoise(c.noise, 1);
  const IntervalModel model(PeripheryParams{}, BinauralParams{}, s.sample_rate);
  Rng rng(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.EvaluateReference(s, rng));
  }
}
BENCHMARK(BM_IntervalReference);

void BM_Trial(benchmark::State& state) {
  const ModelObserver observer(BenchCondition(), ModelParams{});
  uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(observer.RunTrial(50.0, ++seed));
  }
}
BENCHMARK(BM_Trial);

// Serial reference vs the OpenMP track loop on the same workload.
void BM_TracksSerial(benchmark::State& state) {
  const ModelObserver observer(BenchCondition(), ModelParams{});
  const auto source = observer.AsTrialSource();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        RunTracksSerial(source, StaircaseConfig{}, state.range(0), 7));
  }
}
BENCHMARK(BM_TracksSerial)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_TracksParallel(benchmark::State& state) {
  const ModelObserver observer(BenchCondition(), ModelParams{});
  const auto source = observer.AsTrialSource();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        RunTracks(source, StaircaseConfig{}, state.range(0), 7));
  }
}
BENCHMARK(BM_TracksParallel)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace bmld

BENCHMARK_MAIN();
