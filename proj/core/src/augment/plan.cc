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

#include "melforge/augment/plan.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "melforge/error.h"
#include "melforge/format.h"

namespace melforge::augment {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

double parse_number(std::string_view tok, std::string_view step) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size() || !std::isfinite(v)) {
    throw Error(ErrorCode::kParseError, "plan step '" + std::string(step) +
                                            "': bad number '" + std::string(tok) + "'");
  }
  return v;
}

Fill parse_fill(std::string_view tok, std::string_view step) {
  if (tok == "zero") return Fill::kZero;
  if (tok == "gaussian") return Fill::kGaussian;
  throw Error(ErrorCode::kParseError, "plan step '" + std::string(step) +
                                          "': fill must be zero or gaussian");
}

AugmentStep parse_step(std::string_view text) {
  const auto parts = split(text, ':');
  const auto name = parts[0];
  AugmentStep step;
  std::size_t max_parts = 2;
  if (name == "speed") {
    step.kind = StepKind::kSpeed;
    max_parts = 4;
  } else if (name == "loudness") {
    step.kind = StepKind::kLoudness;
  } else if (name == "shift") {
    step.kind = StepKind::kShift;
    max_parts = 3;
  } else if (name == "noise") {
    step.kind = StepKind::kNoise;
  } else if (name == "mask") {
    step.kind = StepKind::kMask;
    max_parts = 3;
  } else {
    throw Error(ErrorCode::kParseError,
                "plan step '" + std::string(text) + "': unknown kind");
  }
  if (parts.size() < 2 || parts.size() > max_parts ||
      (step.kind == StepKind::kSpeed && parts.size() == 3)) {
    throw Error(ErrorCode::kParseError,
                "plan step '" + std::string(text) + "': wrong number of fields");
  }
  step.ratio = parse_number(parts[1], text);
  if (step.kind == StepKind::kSpeed && parts.size() == 4) {
    step.factor_lo = parse_number(parts[2], text);
    step.factor_hi = parse_number(parts[3], text);
  }
  if ((step.kind == StepKind::kShift || step.kind == StepKind::kMask) &&
      parts.size() == 3) {
    step.fill = parse_fill(parts[2], text);
  }
  return step;
}

}  // namespace

std::string_view step_kind_name(StepKind kind) {
  switch (kind) {
    case StepKind::kSpeed: return "speed";
    case StepKind::kLoudness: return "loudness";
    case StepKind::kShift: return "shift";
    case StepKind::kNoise: return "noise";
    case StepKind::kMask: return "mask";
  }
  return "?";
}

bool AugmentationPlan::has_speed() const noexcept {
  return std::any_of(steps.begin(), steps.end(),
                     [](const AugmentStep& s) { return s.kind == StepKind::kSpeed; });
}

std::optional<AugmentStep> AugmentationPlan::speed_step() const {
  for (const auto& s : steps) {
    if (s.kind == StepKind::kSpeed) return s;
  }
  return std::nullopt;
}

void AugmentationPlan::validate() const {
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& s = steps[i];
    const std::string where =
        "plan step " + std::to_string(i) + " (" + std::string(step_kind_name(s.kind)) + ")";
    if (s.kind == StepKind::kNoise) {
      if (!(s.ratio >= 0.0) || !std::isfinite(s.ratio)) {
        throw Error(ErrorCode::kInvalidArgument, where + ": sigma must be >= 0");
      }
    } else if (!(s.ratio >= 0.0 && s.ratio <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, where + ": ratio must lie in [0, 1]");
    }
    if (s.kind == StepKind::kSpeed) {
      if (i != 0) {
        throw Error(ErrorCode::kInvalidArgument,
                    where + ": speed must be the first step and appear once");
      }
      if (!(s.factor_lo > 0.0 && s.factor_lo <= s.factor_hi) ||
          !std::isfinite(s.factor_hi)) {
        throw Error(ErrorCode::kInvalidArgument,
                    where + ": need 0 < factor_lo <= factor_hi");
      }
    }
  }
}

std::string AugmentationPlan::to_string() const {
  if (steps.empty()) return "none";
  std::string out;
  for (const auto& s : steps) {
    if (!out.empty()) out += ",";
    out += std::string(step_kind_name(s.kind)) + ":" + format_double(s.ratio);
    if (s.kind == StepKind::kSpeed) {
      out += ":" + format_double(s.factor_lo) + ":" + format_double(s.factor_hi);
    } else if (s.kind == StepKind::kShift || s.kind == StepKind::kMask) {
      out += s.fill == Fill::kZero ? ":zero" : ":gaussian";
    }
  }
  return out;
}

AugmentationPlan AugmentationPlan::parse(std::string_view text) {
  text = trim(text);
  if (auto p = preset(text)) return *p;
  AugmentationPlan plan;
  if (text.empty() || text == "none") return plan;
  for (auto part : split(text, ',')) {
    if (part.empty()) {
      throw Error(ErrorCode::kParseError, "plan '" + std::string(text) + "': empty step");
    }
    plan.steps.push_back(parse_step(part));
  }
  plan.validate();
  return plan;
}

std::optional<AugmentationPlan> preset(std::string_view name) {
  const AugmentStep speed{StepKind::kSpeed, 0.3, Fill::kZero, 0.7, 1.7};
  const AugmentStep noise{StepKind::kNoise, 0.4};
  const AugmentStep loudness{StepKind::kLoudness, 0.4};
  const AugmentStep shift{StepKind::kShift, 0.3};
  const AugmentStep mask{StepKind::kMask, 0.2};
  if (name == "raw") return AugmentationPlan{};
  if (name == "speed") return AugmentationPlan{{speed}};
  if (name == "noise") return AugmentationPlan{{noise}};
  if (name == "loudness") return AugmentationPlan{{loudness}};
  if (name == "shift") return AugmentationPlan{{shift}};
  if (name == "masking") return AugmentationPlan{{mask}};
  if (name == "combined") {
    return AugmentationPlan{{speed, loudness, shift, noise, mask}};
  }
  return std::nullopt;
}

std::vector<std::string> preset_names() {
  return {"raw", "speed", "noise", "loudness", "shift", "masking", "combined"};
}

}  // namespace melforge::augment
