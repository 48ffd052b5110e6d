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

#ifndef MELFORGE_DATA_SYNTH_H_
#define MELFORGE_DATA_SYNTH_H_

#include <cstdint>
#include <filesystem>

#include "melforge/audio/wav.h"
#include "melforge/data/manifest.h"

namespace melforge::data {

// A two-class corpus for desk-scale runs. "clear" clips are harmonic tone
// stacks with a slow amplitude envelope plus white noise; "mask" clips are
// the same construction passed through a moving-average low-pass, so their
// high bands are attenuated.
struct SynthOptions {
  std::size_t n_per_class = 100;
  std::uint64_t seed = 0;
  int sample_rate = 16000;
  double devel_fraction = 0.2;
};

inline constexpr std::size_t kLowPassTaps = 8;

audio::Waveform synth_clip(Label label, std::uint64_t seed, std::size_t index,
                           int sample_rate = 16000);

// Writes <out>/wav/<label>_<index>.wav and <out>/manifest.csv. Per class the
// last floor(devel_fraction * n) clips go to devel. Re-running with the same
// options is a no-op (a synth.stamp file records them).
Manifest synth_corpus(const SynthOptions& options, const std::filesystem::path& out_dir);

}  // namespace melforge::data

#endif  // MELFORGE_DATA_SYNTH_H_
