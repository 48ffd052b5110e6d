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

#include "melforge/augment/augment.h"

#include <algorithm>
#include <cmath>
#include <span>
#include <string>

#include "melforge/audio/resample.h"
#include "melforge/error.h"

namespace melforge::augment {

using audio::RandomStream;
using features::MelSpectrogram;

namespace {

std::size_t floor_index(double x, std::size_t limit) {
  if (!(x > 0.0)) return 0;
  return std::min(static_cast<std::size_t>(std::floor(x)), limit);
}

double fill_value(Fill fill, RandomStream& rs) {
  return fill == Fill::kZero ? 0.0 : audio::draw_gaussian(rs, 0.0, kFillSigma);
}

}  // namespace

SpeedDraw draw_speed(std::size_t length, RandomStream& rs, double factor_lo,
                     double factor_hi, double window_ratio_max) {
  if (!(window_ratio_max >= 0.0 && window_ratio_max <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "speed_perturb: window_ratio_max must lie in [0, 1]");
  }
  if (!(factor_lo > 0.0 && factor_lo <= factor_hi)) {
    throw Error(ErrorCode::kInvalidArgument,
                "speed_perturb: need 0 < factor_lo <= factor_hi");
  }
  SpeedDraw d;
  const double n = static_cast<double>(length);
  d.start = floor_index(audio::draw_uniform(rs, 0.0, n), length > 0 ? length - 1 : 0);
  d.window_fraction = audio::draw_uniform(rs, 0.0, window_ratio_max);
  d.factor = audio::draw_uniform(rs, factor_lo, factor_hi);
  return d;
}

audio::Waveform speed_perturb(const audio::Waveform& w, const SpeedDraw& d) {
  if (!(d.factor > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "speed_perturb: factor must be > 0");
  }
  const std::size_t n = w.size();
  const std::size_t start = std::min(d.start, n);
  const std::size_t seg = std::min(
      floor_index(d.window_fraction * static_cast<double>(n), n), n - start);
  if (seg == 0 || d.factor == 1.0) return w;

  auto new_len = static_cast<std::size_t>(
      std::llround(static_cast<double>(seg) / d.factor));
  if (new_len == 0 && seg == n) new_len = 1;

  const std::span<const double> all(w.samples);
  audio::Waveform out;
  out.sample_rate = w.sample_rate;
  out.samples.reserve(n - seg + new_len);
  out.samples.insert(out.samples.end(), all.begin(), all.begin() + static_cast<std::ptrdiff_t>(start));
  const auto stretched = audio::interpolate_linear(all.subspan(start, seg), new_len);
  out.samples.insert(out.samples.end(), stretched.begin(), stretched.end());
  out.samples.insert(out.samples.end(), all.begin() + static_cast<std::ptrdiff_t>(start + seg), all.end());
  return out;
}

audio::Waveform speed_perturb(const audio::Waveform& w, RandomStream& rs,
                              double factor_lo, double factor_hi,
                              double window_ratio_max) {
  return speed_perturb(
      w, draw_speed(w.size(), rs, factor_lo, factor_hi, window_ratio_max));
}

audio::Waveform fit_length(const audio::Waveform& w, std::size_t length) {
  audio::Waveform out = w;
  out.samples.resize(length, 0.0);
  return out;
}

MelSpectrogram loudness(const MelSpectrogram& m, double level) {
  MelSpectrogram out = m;
  for (double& v : out.values.data) v += v * level;
  return out;
}

MelSpectrogram loudness(const MelSpectrogram& m, RandomStream& rs,
                        double ratio_max) {
  return loudness(m, audio::draw_uniform(rs, 0.0, ratio_max));
}

ShiftDraw draw_shift(RandomStream& rs, double ratio_max) {
  ShiftDraw d;
  d.fraction = audio::draw_uniform(rs, 0.0, ratio_max);
  d.right = audio::draw_bernoulli(rs, 0.5);
  return d;
}

MelSpectrogram shift(const MelSpectrogram& m, const ShiftDraw& d, Fill fill,
                     RandomStream& fill_rs) {
  const std::size_t rows = m.n_mels();
  const std::size_t cols = m.n_frames();
  const std::size_t k =
      floor_index(d.fraction * static_cast<double>(cols), cols);
  if (k == 0) return m;

  MelSpectrogram out = m;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (d.right) {
        out.values(r, c) = c < k ? fill_value(fill, fill_rs) : m.values(r, c - k);
      } else {
        out.values(r, c) =
            c + k < cols ? m.values(r, c + k) : fill_value(fill, fill_rs);
      }
    }
  }
  return out;
}

MelSpectrogram shift(const MelSpectrogram& m, RandomStream& rs, double ratio_max,
                     Fill fill) {
  const ShiftDraw d = draw_shift(rs, ratio_max);
  return shift(m, d, fill, rs);
}

MelSpectrogram noise(const MelSpectrogram& m, RandomStream& rs, double sigma) {
  MelSpectrogram out = m;
  for (double& v : out.values.data) v += v * audio::draw_gaussian(rs, 0.0, sigma);
  return out;
}

MaskDraw draw_mask(std::size_t n_mels, std::size_t n_frames, RandomStream& rs,
                   double ratio_max) {
  MaskDraw d;
  const double frames = static_cast<double>(n_frames);
  const double mels = static_cast<double>(n_mels);
  d.time_start = floor_index(audio::draw_uniform(rs, 0.0, frames), n_frames);
  d.time_width = floor_index(audio::draw_uniform(rs, 0.0, ratio_max) * frames, n_frames);
  d.freq_start = floor_index(audio::draw_uniform(rs, 0.0, mels), n_mels);
  d.freq_width = floor_index(audio::draw_uniform(rs, 0.0, ratio_max) * mels, n_mels);
  return d;
}

MelSpectrogram mask(const MelSpectrogram& m, const MaskDraw& d, Fill fill,
                    RandomStream& fill_rs) {
  const std::size_t rows = m.n_mels();
  const std::size_t cols = m.n_frames();
  MelSpectrogram out = m;
  const std::size_t c0 = std::min(d.time_start, cols);
  const std::size_t c1 = std::min(cols, c0 + d.time_width);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = c0; c < c1; ++c) out.values(r, c) = fill_value(fill, fill_rs);
  }
  const std::size_t r0 = std::min(d.freq_start, rows);
  const std::size_t r1 = std::min(rows, r0 + d.freq_width);
  for (std::size_t r = r0; r < r1; ++r) {
    for (std::size_t c = 0; c < cols; ++c) out.values(r, c) = fill_value(fill, fill_rs);
  }
  return out;
}

MelSpectrogram mask(const MelSpectrogram& m, RandomStream& rs, double ratio_max,
                    Fill fill) {
  const MaskDraw d = draw_mask(m.n_mels(), m.n_frames(), rs, ratio_max);
  return mask(m, d, fill, rs);
}

RandomStream step_stream(const RandomStream& rs, StepKind kind,
                         std::size_t position) {
  audio::StreamId id = rs.id();
  id.step_tag = audio::mix64(id.step_tag ^ audio::tag_of(step_kind_name(kind))) +
                position;
  return RandomStream(rs.seed(), id);
}

MelSpectrogram augment_log_mel(const MelSpectrogram& m,
                               const AugmentationPlan& plan,
                               const RandomStream& rs) {
  MelSpectrogram cur = m;
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const auto& step = plan.steps[i];
    RandomStream srs = step_stream(rs, step.kind, i);
    switch (step.kind) {
      case StepKind::kSpeed:
        break;
      case StepKind::kLoudness:
        cur = loudness(cur, srs, step.ratio);
        break;
      case StepKind::kShift:
        cur = shift(cur, srs, step.ratio, step.fill);
        break;
      case StepKind::kNoise:
        cur = noise(cur, srs, step.ratio);
        break;
      case StepKind::kMask:
        cur = mask(cur, srs, step.ratio, step.fill);
        break;
    }
  }
  return cur;
}

MelSpectrogram apply_plan(const audio::Waveform& clip_audio,
                          const AugmentationPlan& plan, const RandomStream& rs,
                          const features::MelExtractor& extractor) {
  plan.validate();
  audio::Waveform audio = clip_audio;
  if (auto speed = plan.speed_step()) {
    RandomStream srs = step_stream(rs, StepKind::kSpeed, 0);
    audio = fit_length(speed_perturb(audio, srs, speed->factor_lo,
                                     speed->factor_hi, speed->ratio),
                       clip_audio.size());
  }
  return features::normalize_local(
      augment_log_mel(extractor.log_mel(audio), plan, rs));
}

}  // namespace melforge::augment
