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

#ifndef MELFORGE_METRICS_METRICS_H_
#define MELFORGE_METRICS_METRICS_H_

#include <cstddef>
#include <span>

namespace melforge::metrics {

// Label 1 ("mask") is the positive class.
struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const noexcept { return tp + fp + tn + fn; }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

// A sample is predicted positive iff prob >= threshold. Labels must be 0 or
// 1. Throws kLengthMismatch, kEmpty, or kInvalidArgument for other labels.
ConfusionMatrix confusion(std::span<const double> probs,
                          std::span<const int> labels,
                          double threshold = 0.5);

// Unweighted average recall 0.5 * (tp / (tp + fn) + tn / (tn + fp)).
// kDegenerateClass when either class has no ground-truth members.
double uar(const ConfusionMatrix& cm);

}  // namespace melforge::metrics

#endif  // MELFORGE_METRICS_METRICS_H_
