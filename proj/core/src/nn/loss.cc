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

#include "melforge/nn/loss.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "melforge/error.h"

namespace melforge::nn {
namespace {

void check_lengths(std::span<const double> pred, std::span<const double> labels) {
  if (pred.size() != labels.size() || pred.empty()) {
    throw Error(ErrorCode::kLengthMismatch,
                "bce: " + std::to_string(pred.size()) + " predictions vs " +
                    std::to_string(labels.size()) + " labels");
  }
}

double clamp_prob(double p) { return std::clamp(p, kProbClamp, 1.0 - kProbClamp); }

}  // namespace

double bce_loss(std::span<const double> pred, std::span<const double> labels) {
  check_lengths(pred, labels);
  double total = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double p = clamp_prob(pred[i]);
    const double y = labels[i];
    total += -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
  }
  return total / static_cast<double>(pred.size());
}

std::vector<double> bce_grad(std::span<const double> pred,
                             std::span<const double> labels) {
  check_lengths(pred, labels);
  const double n = static_cast<double>(pred.size());
  std::vector<double> g(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double p = clamp_prob(pred[i]);
    const double y = labels[i];
    g[i] = (-y / p + (1.0 - y) / (1.0 - p)) / n;
  }
  return g;
}

LossResult model_loss(const std::vector<Tensor>& outputs,
                      std::span<const double> labels) {
  if (outputs.empty()) throw Error(ErrorCode::kEmpty, "model_loss: no outputs");
  LossResult r;
  const double k = static_cast<double>(outputs.size());
  for (const auto& out : outputs) {
    r.value += bce_loss(out.data(), labels) / k;
    auto g = bce_grad(out.data(), labels);
    for (double& v : g) v /= k;
    r.grads.emplace_back(out.shape(), std::move(g));
  }
  return r;
}

}  // namespace melforge::nn
