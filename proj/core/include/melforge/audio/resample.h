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

#ifndef MELFORGE_AUDIO_RESAMPLE_H_
#define MELFORGE_AUDIO_RESAMPLE_H_

#include <cstddef>
#include <span>
#include <vector>

#include "melforge/audio/wav.h"

namespace melforge::audio {

// Stretches samples to out_len points by linear interpolation; output point
// j samples the input at position j * (n / out_len), clamped to the last
// sample. out_len == n returns the input unchanged.
std::vector<double> interpolate_linear(std::span<const double> samples,
                                       std::size_t out_len);

// Output length round(n * target_rate / w.sample_rate), at least 1.
Waveform resample_linear(const Waveform& w, int target_rate);

}  // namespace melforge::audio

#endif  // MELFORGE_AUDIO_RESAMPLE_H_
