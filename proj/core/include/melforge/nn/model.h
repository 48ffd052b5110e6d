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

#ifndef MELFORGE_NN_MODEL_H_
#define MELFORGE_NN_MODEL_H_

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "melforge/nn/layers.h"

namespace melforge::nn {

// CC: plain conv classifier. SSN: one full conv classifier per mel band whose
// sigmoid outputs feed a global classifier. SSC: band-wise conv stacks whose
// flattened maps feed one global classifier. RCC: CC with a residual block
// after every strided conv.
enum class Architecture { kCC, kSSN, kSSC, kRCC };

std::string_view architecture_name(Architecture arch);  // "cc", "ssn", ...
// Case-insensitive; throws Error(kUnknownArchitecture).
Architecture parse_architecture(std::string_view name);
std::vector<Architecture> all_architectures();

// Defaults are the published configuration; tests shrink them.
struct ArchitectureConfig {
  std::size_t input_height = 64;
  std::size_t input_width = 87;
  std::vector<std::size_t> conv_filters{32, 64, 128, 64};
  std::vector<std::size_t> linear_units{128, 256, 128, 1};
  std::size_t bands = 4;
  double dropout = 0.2;
  double leaky_slope = 0.01;

  friend bool operator==(const ArchitectureConfig&, const ArchitectureConfig&) = default;
};

// One row of the parameter audit: a layer holding trainable parameters.
struct LayerCount {
  std::string name;
  std::string kind;
  std::string shapes;  // e.g. "32x9 + 32"
  std::size_t count = 0;
};

class Model {
 public:
  Model(Architecture arch, ArchitectureConfig config);

  Architecture architecture() const noexcept { return arch_; }
  const ArchitectureConfig& config() const noexcept { return config_; }

  // Outputs per sample: 1, or bands + 1 for SSN (band predictions first,
  // global prediction last). The last output is always the prediction.
  std::size_t num_outputs() const noexcept;

  // batch is [N, 1, H, W]; each output is [N, 1] of probabilities.
  std::vector<Tensor> forward(const Tensor& batch, const ForwardContext& ctx);
  // One gradient per output; returns the gradient w.r.t. the batch.
  Tensor backward(const std::vector<Tensor>& grad_outputs);

  // Eval-mode forward returning the prediction output as a flat vector.
  std::vector<double> predict(const Tensor& batch);

  std::vector<Parameter*> parameters();
  std::vector<Parameter*> buffers();
  void zero_grad();

  std::size_t parameter_count();
  std::vector<LayerCount> parameter_table();

  // Row ranges [first, last) of the input each branch sees.
  std::vector<std::pair<std::size_t, std::size_t>> branch_rows() const;
  // Spatial shape after the conv stack of one branch: {C, H, W}.
  Shape conv_output_shape() const;

  void visit(const std::function<void(Layer&)>& fn);

 private:
  void check_input(const Tensor& batch) const;
  Tensor slice_rows(const Tensor& batch, std::size_t branch) const;

  Architecture arch_;
  ArchitectureConfig config_;
  std::size_t branch_height_ = 0;
  std::size_t branch_features_ = 0;
  std::vector<std::unique_ptr<Sequential>> branches_;
  std::unique_ptr<Sequential> global_;
};

// Builds and initializes an architecture: Kaiming-normal fan-in weights for
// convs and linears (gain for the leaky slope), zero biases, batchnorm
// gamma = 1 and beta = 0, all drawn from init_seed.
std::unique_ptr<Model> build_model(Architecture arch,
                                   const ArchitectureConfig& config = {},
                                   std::uint64_t init_seed = 0);

// Published totals for the four architectures, used for the deviation report.
std::size_t reference_parameter_count(Architecture arch);

}  // namespace melforge::nn

#endif  // MELFORGE_NN_MODEL_H_
