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

#ifndef MELFORGE_AUGMENT_AUGMENT_H_
#define MELFORGE_AUGMENT_AUGMENT_H_

#include <cstddef>

#include "melforge/audio/random.h"
#include "melforge/audio/wav.h"
#include "melforge/augment/plan.h"
#include "melforge/features/mel.h"

namespace melforge::augment {

// Sigma of the Gaussian fill option for shift and mask.
inline constexpr double kFillSigma = 0.4;

// Each augmentation comes in two layers: a draw_* function that samples the
// random magnitudes from a stream, and an overload that applies explicit
// (forced) draws. The stream overloads are draw_* followed by the apply.

// --- Speed (raw audio) ------------------------------------------------------

struct SpeedDraw {
  std::size_t start = 0;         // s ~ U(0, T), floored
  double window_fraction = 0.0;  // wr ~ U(0, window_ratio_max)
  double factor = 1.0;           // a ~ U(factor_lo, factor_hi)
};

SpeedDraw draw_speed(std::size_t length, audio::RandomStream& rs,
                     double factor_lo, double factor_hi,
                     double window_ratio_max);

// The segment [start, start + floor(wr * T)) (clamped to T) is resampled to
// round(len / factor) samples; the rest is copied unchanged.
audio::Waveform speed_perturb(const audio::Waveform& w, const SpeedDraw& d);
audio::Waveform speed_perturb(const audio::Waveform& w, audio::RandomStream& rs,
                              double factor_lo = 0.7, double factor_hi = 1.7,
                              double window_ratio_max = 0.3);

// Truncates or zero-pads at the end to exactly length samples. Used after
// speed_perturb so every clip keeps the model's input width.
audio::Waveform fit_length(const audio::Waveform& w, std::size_t length);

// --- Loudness ---------------------------------------------------------------

// v -> v * (1 + level).
features::MelSpectrogram loudness(const features::MelSpectrogram& m,
                                  double level);
features::MelSpectrogram loudness(const features::MelSpectrogram& m,
                                  audio::RandomStream& rs,
                                  double ratio_max = 0.4);

// --- Shift ------------------------------------------------------------------

struct ShiftDraw {
  double fraction = 0.0;  // f ~ U(0, ratio_max)
  bool right = true;      // direction ~ Bernoulli(0.5)
};

ShiftDraw draw_shift(audio::RandomStream& rs, double ratio_max);

// Moves content floor(f * n_frames) columns; vacated columns get zeros or,
// for Fill::kGaussian, N(0, 0.4) draws from fill_rs.
features::MelSpectrogram shift(const features::MelSpectrogram& m,
                               const ShiftDraw& d, Fill fill,
                               audio::RandomStream& fill_rs);
features::MelSpectrogram shift(const features::MelSpectrogram& m,
                               audio::RandomStream& rs, double ratio_max = 0.3,
                               Fill fill = Fill::kZero);

// --- Noise ------------------------------------------------------------------

// v -> v + v * g with an independent g ~ N(0, sigma) per cell.
features::MelSpectrogram noise(const features::MelSpectrogram& m,
                               audio::RandomStream& rs, double sigma = 0.4);

// --- Mask -------------------------------------------------------------------

struct MaskDraw {
  std::size_t time_start = 0;  // floor(U(0, n_frames))
  std::size_t time_width = 0;  // floor(U(0, ratio_max) * n_frames)
  std::size_t freq_start = 0;  // floor(U(0, n_mels))
  std::size_t freq_width = 0;  // floor(U(0, ratio_max) * n_mels)
};

MaskDraw draw_mask(std::size_t n_mels, std::size_t n_frames,
                   audio::RandomStream& rs, double ratio_max);

// Fills columns [time_start, time_start + time_width) and rows
// [freq_start, freq_start + freq_width), both clamped at the edge.
features::MelSpectrogram mask(const features::MelSpectrogram& m,
                              const MaskDraw& d, Fill fill,
                              audio::RandomStream& fill_rs);
features::MelSpectrogram mask(const features::MelSpectrogram& m,
                              audio::RandomStream& rs, double ratio_max = 0.2,
                              Fill fill = Fill::kZero);

// --- Plans ------------------------------------------------------------------

// The stream for step i of a plan run under rs: same seed, sample and epoch
// as rs, step_tag mixed with the step kind and position. Steps therefore never
// share draws and adding a step does not perturb the others.
audio::RandomStream step_stream(const audio::RandomStream& rs, StepKind kind,
                                std::size_t position);

// Applies the non-speed steps of plan, in order, to a log-mel spectrogram.
// Speed steps are skipped (they belong to the raw-audio stage).
features::MelSpectrogram augment_log_mel(const features::MelSpectrogram& m,
                                         const AugmentationPlan& plan,
                                         const audio::RandomStream& rs);

// Full per-clip pipeline: speed on raw audio (if planned) fitted back to the
// clip's length, log-mel extraction, spectrogram steps in plan order, then local normalization.
features::MelSpectrogram apply_plan(const audio::Waveform& clip_audio,
                                    const AugmentationPlan& plan,
                                    const audio::RandomStream& rs,
                                    const features::MelExtractor& extractor);

}  // namespace melforge::augment

#endif  // MELFORGE_AUGMENT_AUGMENT_H_
