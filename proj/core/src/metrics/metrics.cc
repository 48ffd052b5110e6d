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

#include "melforge/metrics/metrics.h"

#include <string>

#include "melforge/error.h"

namespace melforge::metrics {

ConfusionMatrix confusion(std::span<const double> probs,
                          std::span<const int> labels, double threshold) {
  if (probs.size() != labels.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "confusion: " + std::to_string(probs.size()) + " scores vs " +
                    std::to_string(labels.size()) + " labels");
  }
  if (probs.empty()) throw Error(ErrorCode::kEmpty, "confusion: no samples");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const bool predicted = probs[i] >= threshold;
    switch (labels[i]) {
      case 1: predicted ? ++cm.tp : ++cm.fn; break;
      case 0: predicted ? ++cm.fp : ++cm.tn; break;
      default:
        throw Error(ErrorCode::kInvalidArgument,
                    "confusion: label " + std::to_string(labels[i]) + " at index " +
                        std::to_string(i) + " is not 0 or 1");
    }
  }
  return cm;
}

double uar(const ConfusionMatrix& cm) {
  if (cm.tp + cm.fn == 0) {
    throw Error(ErrorCode::kDegenerateClass, "uar: no positive samples");
  }
  if (cm.tn + cm.fp == 0) {
    throw Error(ErrorCode::kDegenerateClass, "uar: no negative samples");
  }
  const double recall_pos =
      static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
  const double recall_neg =
      static_cast<double>(cm.tn) / static_cast<double>(cm.tn + cm.fp);
  return 0.5 * (recall_pos + recall_neg);
}

}  // namespace melforge::metrics
