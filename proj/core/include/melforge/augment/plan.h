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

#ifndef MELFORGE_AUGMENT_PLAN_H_
#define MELFORGE_AUGMENT_PLAN_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace melforge::augment {

enum class StepKind { kSpeed, kLoudness, kShift, kNoise, kMask };
enum class Fill { kZero, kGaussian };

std::string_view step_kind_name(StepKind kind);

// One augmentation with its sampling bounds. ratio is the upper bound of the
// magnitude sampler: speed window fraction, loudness factor, shift fraction,
// noise sigma, or mask width fraction.
struct AugmentStep {
  StepKind kind = StepKind::kShift;
  double ratio = 0.0;
  Fill fill = Fill::kZero;  // shift and mask only
  double factor_lo = 0.7;   // speed only
  double factor_hi = 1.7;   // speed only

  friend bool operator==(const AugmentStep&, const AugmentStep&) = default;
};

// Ordered steps. Speed, if present, appears once and first because it works
// on raw audio; the rest act on the log-mel spectrogram in order.
//
// Text form: comma-separated steps, each "kind:ratio[:options]":
//   speed:<window_ratio_max>[:<factor_lo>:<factor_hi>]
//   loudness:<ratio>    noise:<sigma>
//   shift:<ratio>[:zero|gaussian]    mask:<ratio>[:zero|gaussian]
// The empty plan is written "none".
struct AugmentationPlan {
  std::vector<AugmentStep> steps;

  bool empty() const noexcept { return steps.empty(); }
  bool has_speed() const noexcept;
  // The speed step if present.
  std::optional<AugmentStep> speed_step() const;

  // Throws melforge::Error(kInvalidArgument) naming the broken step.
  void validate() const;

  std::string to_string() const;
  // Accepts the text form or a preset name (see preset()).
  static AugmentationPlan parse(std::string_view text);

  friend bool operator==(const AugmentationPlan&, const AugmentationPlan&) = default;
};

// Experiment presets with the default bounds: raw, speed, noise, loudness,
// shift, masking, combined. Returns nullopt for an unknown name.
std::optional<AugmentationPlan> preset(std::string_view name);
std::vector<std::string> preset_names();

}  // namespace melforge::augment

#endif  // MELFORGE_AUGMENT_PLAN_H_
