/* Copyright 2026 The melforge Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <benchmark/benchmark.h>

#include "melforge/audio/random.h"
#include "melforge/audio/resample.h"
#include "melforge/augment/augment.h"
#include "melforge/data/synth.h"
#include "melforge/features/mel.h"

namespace melforge::augment {
namespace {

features::MelSpectrogram sample_mel() {
  const features::MelExtractor ex;
  return ex.log_mel(
      audio::resample_linear(data::synth_clip(data::Label::kClear, 2, 0), 22050));
}

void BM_Speed(benchmark::State& state) {
  const auto w =
      audio::resample_linear(data::synth_clip(data::Label::kClear, 2, 0), 22050);
  std::uint64_t i = 0;
  for (auto _ : state) {
    audio::RandomStream rs(7, {i++, 0, 0});
    benchmark::DoNotOptimize(fit_length(speed_perturb(w, rs), w.samples.size()));
  }
}
BENCHMARK(BM_Speed)->Unit(benchmark::kMicrosecond);

void BM_SpectrogramSteps(benchmark::State& state) {
  const auto m = sample_mel();
  const auto plan = *preset("combined");
  std::uint64_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(augment_log_mel(m, plan, audio::RandomStream(7, {i++, 0, 0})));
  }
}
BENCHMARK(BM_SpectrogramSteps)->Unit(benchmark::kMicrosecond);

void BM_Mask(benchmark::State& state) {
  const auto m = sample_mel();
  std::uint64_t i = 0;
  for (auto _ : state) {
    audio::RandomStream rs(7, {i++, 0, 0});
    benchmark::DoNotOptimize(mask(m, rs));
  }
}
BENCHMARK(BM_Mask)->Unit(benchmark::kMicrosecond);

void BM_ApplyPlan(benchmark::State& state) {
  const auto w =
      audio::resample_linear(data::synth_clip(data::Label::kMask, 3, 0), 22050);
  const features::MelExtractor ex;
  const auto plan = *preset("combined");
  std::uint64_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(apply_plan(w, plan, audio::RandomStream(7, {i++, 0, 0}), ex));
  }
}
BENCHMARK(BM_ApplyPlan)->Unit(benchmark::kMicrosecond);

}  // namespace
}  // namespace melforge::augment
