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

#ifndef MELFORGE_NN_LAYERS_H_
#define MELFORGE_NN_LAYERS_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "melforge/nn/tensor.h"

namespace melforge::nn {

enum class Mode { kTrain, kEval };

// Per-forward state. Dropout masks are drawn from counter-based streams keyed
// by (seed, step, epoch, layer), so repeating a forward with the same context
// reproduces the same masks.
struct ForwardContext {
  Mode mode = Mode::kEval;
  std::uint64_t seed = 0;
  std::uint64_t step = 0;
  std::uint64_t epoch = 0;
};

// A differentiable operation with cached activations. backward() must follow
// the matching forward(); it accumulates parameter gradients and returns the
// gradient with respect to the forward input.
class Layer {
 public:
  explicit Layer(std::string name) : name_(std::move(name)) {}
  virtual ~Layer() = default;
  Layer(const Layer&) = delete;
  Layer& operator=(const Layer&) = delete;

  const std::string& name() const noexcept { return name_; }
  virtual std::string kind() const = 0;

  virtual Tensor forward(const Tensor& x, const ForwardContext& ctx) = 0;
  virtual Tensor backward(const Tensor& grad_out) = 0;
  virtual Shape output_shape(const Shape& in) const = 0;

  // Trainable parameters owned directly by this layer.
  virtual std::vector<Parameter*> parameters() { return {}; }
  // Non-trainable state (running statistics).
  virtual std::vector<Parameter*> buffers() { return {}; }

  // Visits this layer and, for containers, every nested layer (pre-order).
  virtual void visit(const std::function<void(Layer&)>& fn) { fn(*this); }

 private:
  std::string name_;
};

// Cross-correlation with a square kernel, NCHW in and out. Output extent per
// spatial axis is floor((in + 2 * pad - kernel) / stride) + 1.
class Conv2d : public Layer {
 public:
  Conv2d(std::string name, std::size_t in_channels, std::size_t out_channels,
         std::size_t kernel = 3, std::size_t stride = 2, std::size_t pad = 2);

  std::string kind() const override { return "Conv2d"; }
  Tensor forward(const Tensor& x, const ForwardContext& ctx) override;
  Tensor backward(const Tensor& grad_out) override;
  Shape output_shape(const Shape& in) const override;
  std::vector<Parameter*> parameters() override { return {&weight_, &bias_}; }

  Parameter& weight() { return weight_; }  // [out, in * k * k]
  Parameter& bias() { return bias_; }      // [out]
  std::size_t in_channels() const { return in_; }
  std::size_t out_channels() const { return out_; }

 private:
  std::size_t in_, out_, kernel_, stride_, pad_;
  Parameter weight_, bias_;
  Tensor input_;
};

// y = x W^T + b on [N, in].
class Linear : public Layer {
 public:
  Linear(std::string name, std::size_t in_features, std::size_t out_features);

  std::string kind() const override { return "Linear"; }
  Tensor forward(const Tensor& x, const ForwardContext& ctx) override;
  Tensor backward(const Tensor& grad_out) override;
  Shape output_shape(const Shape& in) const override;
  std::vector<Parameter*> parameters() override { return {&weight_, &bias_}; }

  Parameter& weight() { return weight_; }  // [out, in]
  Parameter& bias() { return bias_; }      // [out]
  std::size_t in_features() const { return in_; }

 private:
  std::size_t in_, out_;
  Parameter weight_, bias_;
  Tensor input_;
};

// Per-channel batch normalization over [N, C] or [N, C, H, W]. Train mode
// uses batch statistics (biased variance) and needs N >= 2; eval mode uses
// running statistics updated with the given momentum.
class BatchNorm : public Layer {
 public:
  BatchNorm(std::string name, std::size_t channels, double momentum = 0.1,
            double eps = 1e-5);

  std::string kind() const override { return "BatchNorm"; }
  Tensor forward(const Tensor& x, const ForwardContext& ctx) override;
  Tensor backward(const Tensor& grad_out) override;
  Shape output_shape(const Shape& in) const override { return in; }
  std::vector<Parameter*> parameters() override { return {&gamma_, &beta_}; }
  std::vector<Parameter*> buffers() override {
    return {&running_mean_, &running_var_};
  }

  Parameter& gamma() { return gamma_; }
  Parameter& beta() { return beta_; }

 private:
  std::size_t channels_;
  double momentum_, eps_;
  Parameter gamma_, beta_, running_mean_, running_var_;
  Mode mode_ = Mode::kEval;
  Shape in_shape_;
  Tensor xhat_;
  std::vector<double> inv_std_;
};

// Inverted dropout: zero with probability rate, scale survivors by
// 1 / (1 - rate). Identity in eval mode.
class Dropout : public Layer {
 public:
  Dropout(std::string name, double rate, std::uint64_t stream_tag);

  std::string kind() const override { return "Dropout"; }
  Tensor forward(const Tensor& x, const ForwardContext& ctx) override;
  Tensor backward(const Tensor& grad_out) override;
  Shape output_shape(const Shape& in) const override { return in; }
  double rate() const { return rate_; }

 private:
  double rate_;
  std::uint64_t stream_tag_;
  std::vector<double> scale_;  // empty when the last forward was identity
};

class LeakyReLU : public Layer {
 public:
  LeakyReLU(std::string name, double slope = 0.01);

  std::string kind() const override { return "LeakyReLU"; }
  Tensor forward(const Tensor& x, const ForwardContext& ctx) override;
  Tensor backward(const Tensor& grad_out) override;
  Shape output_shape(const Shape& in) const override { return in; }

 private:
  double slope_;
  Tensor input_;
};

class Sigmoid : public Layer {
 public:
  explicit Sigmoid(std::string name) : Layer(std::move(name)) {}

  std::string kind() const override { return "Sigmoid"; }
  Tensor forward(const Tensor& x, const ForwardContext& ctx) override;
  Tensor backward(const Tensor& grad_out) override;
  Shape output_shape(const Shape& in) const override { return in; }

 private:
  Tensor output_;
};

// [N, ...] -> [N, prod(...)].
class Flatten : public Layer {
 public:
  explicit Flatten(std::string name) : Layer(std::move(name)) {}

  std::string kind() const override { return "Flatten"; }
  Tensor forward(const Tensor& x, const ForwardContext& ctx) override;
  Tensor backward(const Tensor& grad_out) override;
  Shape output_shape(const Shape& in) const override;

 private:
  Shape in_shape_;
};

class Sequential : public Layer {
 public:
  explicit Sequential(std::string name) : Layer(std::move(name)) {}

  std::string kind() const override { return "Sequential"; }
  Tensor forward(const Tensor& x, const ForwardContext& ctx) override;
  Tensor backward(const Tensor& grad_out) override;
  Shape output_shape(const Shape& in) const override;
  void visit(const std::function<void(Layer&)>& fn) override;

  template <typename L, typename... Args>
  L& add(Args&&... args) {
    auto layer = std::make_unique<L>(std::forward<Args>(args)...);
    L& ref = *layer;
    layers_.push_back(std::move(layer));
    return ref;
  }
  std::size_t size() const { return layers_.size(); }
  Layer& at(std::size_t i) { return *layers_.at(i); }

 private:
  std::vector<std::unique_ptr<Layer>> layers_;
};

// y = LeakyReLU(x + body(x)); body must preserve the input shape.
class ResidualBlock : public Layer {
 public:
  ResidualBlock(std::string name, double slope);

  std::string kind() const override { return "ResidualBlock"; }
  Tensor forward(const Tensor& x, const ForwardContext& ctx) override;
  Tensor backward(const Tensor& grad_out) override;
  Shape output_shape(const Shape& in) const override { return in; }
  void visit(const std::function<void(Layer&)>& fn) override;

  Sequential& body() { return body_; }

 private:
  Sequential body_;
  LeakyReLU activation_;
};

}  // namespace melforge::nn

#endif  // MELFORGE_NN_LAYERS_H_
