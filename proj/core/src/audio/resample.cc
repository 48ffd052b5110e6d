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

#include "melforge/audio/resample.h"

#include <algorithm>
#include <cmath>

#include "melforge/error.h"

namespace melforge::audio {

std::vector<double> interpolate_linear(std::span<const double> samples,
                                       std::size_t out_len) {
  const std::size_t n = samples.size();
  if (n == 0 || out_len == 0) return {};
  if (out_len == n) return {samples.begin(), samples.end()};

  std::vector<double> out(out_len);
  const double step = static_cast<double>(n) / static_cast<double>(out_len);
  for (std::size_t j = 0; j < out_len; ++j) {
    const double pos = static_cast<double>(j) * step;
    const std::size_t i0 =
        std::min(static_cast<std::size_t>(pos), n - 1);
    const std::size_t i1 = std::min(i0 + 1, n - 1);
    const double frac = std::min(pos - static_cast<double>(i0), 1.0);
    out[j] = samples[i0] + (samples[i1] - samples[i0]) * frac;
  }
  return out;
}

Waveform resample_linear(const Waveform& w, int target_rate) {
  if (target_rate <= 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "resample_linear: target_rate must be positive");
  }
  if (w.sample_rate <= 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "resample_linear: input sample_rate must be positive");
  }
  if (target_rate == w.sample_rate) return w;

  const double scaled = static_cast<double>(w.size()) * target_rate /
                        static_cast<double>(w.sample_rate);
  const auto out_len =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(scaled)));
  return Waveform{interpolate_linear(w.samples, out_len), target_rate};
}

}  // namespace melforge::audio
