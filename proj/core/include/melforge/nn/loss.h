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

#ifndef MELFORGE_NN_LOSS_H_
#define MELFORGE_NN_LOSS_H_

#include <span>
#include <vector>

#include "melforge/nn/tensor.h"

namespace melforge::nn {

inline constexpr double kProbClamp = 1e-7;

// Mean binary cross-entropy over the batch; predictions are clamped to
// [1e-7, 1 - 1e-7]. kLengthMismatch if the spans differ in size.
double bce_loss(std::span<const double> pred, std::span<const double> labels);
// d(bce_loss)/d(pred), evaluated at the clamped predictions.
std::vector<double> bce_grad(std::span<const double> pred,
                             std::span<const double> labels);

struct LossResult {
  double value = 0.0;
  std::vector<Tensor> grads;  // one per model output
};

// Mean of the per-output BCE losses. With a single output this is plain BCE;
// for SSN it averages the band and global losses.
LossResult model_loss(const std::vector<Tensor>& outputs,
                      std::span<const double> labels);

}  // namespace melforge::nn

#endif  // MELFORGE_NN_LOSS_H_
