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

#include <benchmark/benchmark.h>

#include <random>

#include "melforge/nn/layers.h"
#include "melforge/nn/loss.h"
#include "melforge/nn/model.h"

namespace melforge::nn {
namespace {

Tensor random_batch(Shape shape) {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> d;
  Tensor t(std::move(shape));
  for (auto& v : t.storage()) v = d(gen);
  return t;
}

// args: batch, in channels, out channels, height, width
void BM_Conv2dForward(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Conv2d conv("c", state.range(1), state.range(2));
  const Tensor x = random_batch({n, static_cast<std::size_t>(state.range(1)),
                                 static_cast<std::size_t>(state.range(3)),
                                 static_cast<std::size_t>(state.range(4))});
  const ForwardContext ctx{Mode::kTrain, 0, 0, 0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(conv.forward(x, ctx));
  }
}
BENCHMARK(BM_Conv2dForward)
    ->Args({16, 1, 32, 64, 87})
    ->Args({16, 32, 64, 33, 45})
    ->Args({16, 64, 128, 18, 24})
    ->Unit(benchmark::kMillisecond);

void BM_Conv2dBackward(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Conv2d conv("c", state.range(1), state.range(2));
  const Tensor x = random_batch({n, static_cast<std::size_t>(state.range(1)),
                                 static_cast<std::size_t>(state.range(3)),
                                 static_cast<std::size_t>(state.range(4))});
  const ForwardContext ctx{Mode::kTrain, 0, 0, 0};
  const Tensor g = random_batch(conv.forward(x, ctx).shape());
  for (auto _ : state) {
    benchmark::DoNotOptimize(conv.backward(g));
  }
}
BENCHMARK(BM_Conv2dBackward)
    ->Args({16, 1, 32, 64, 87})
    ->Args({16, 32, 64, 33, 45})
    ->Args({16, 64, 128, 18, 24})
    ->Unit(benchmark::kMillisecond);

void BM_TrainStep(benchmark::State& state) {
  const auto arch = static_cast<Architecture>(state.range(0));
  auto model = build_model(arch, {}, 1);
  const Tensor x = random_batch({16, 1, 64, 87});
  std::vector<double> labels(16);
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = i % 2;
  std::uint64_t step = 0;
  for (auto _ : state) {
    model->zero_grad();
    const auto r = model_loss(model->forward(x, {Mode::kTrain, 0, step++, 0}), labels);
    benchmark::DoNotOptimize(model->backward(r.grads));
  }
  state.SetLabel(std::string(architecture_name(arch)));
}
BENCHMARK(BM_TrainStep)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace melforge::nn
