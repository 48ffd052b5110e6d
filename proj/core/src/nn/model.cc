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

#include "melforge/nn/model.h"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "melforge/audio/random.h"
#include "melforge/error.h"

namespace melforge::nn {
namespace {

struct Builder {
  const ArchitectureConfig& config;
  std::uint64_t dropout_index = 0;

  void dropout(Sequential& seq, const std::string& name) {
    seq.add<Dropout>(name, config.dropout,
                     audio::tag_of("dropout") + dropout_index++);
  }

  // Four strided conv stages; each is dropout -> conv -> batchnorm -> leaky
  // ReLU, optionally followed by a residual block of two same-shape convs.
  std::size_t conv_stack(Sequential& seq, const std::string& prefix,
                         bool residual) {
    std::size_t in = 1;
    for (std::size_t i = 0; i < config.conv_filters.size(); ++i) {
      const std::size_t out = config.conv_filters[i];
      const std::string p = prefix + "conv" + std::to_string(i);
      dropout(seq, p + ".dropout");
      seq.add<Conv2d>(p, in, out, 3, 2, 2);
      seq.add<BatchNorm>(p + ".bn", out);
      seq.add<LeakyReLU>(p + ".act", config.leaky_slope);
      if (residual) {
        auto& block = seq.add<ResidualBlock>(p + ".res", config.leaky_slope);
        auto& body = block.body();
        for (int j = 0; j < 2; ++j) {
          const std::string q = p + ".res.conv" + std::to_string(j);
          dropout(body, q + ".dropout");
          body.add<Conv2d>(q, out, out, 3, 1, 1);
          body.add<BatchNorm>(q + ".bn", out);
          if (j == 0) body.add<LeakyReLU>(q + ".act", config.leaky_slope);
        }
      }
      in = out;
    }
    return in;
  }

  // Dropout -> linear per layer; leaky ReLU between, sigmoid at the end.
  void classifier(Sequential& seq, const std::string& prefix,
                  std::size_t in_features) {
    std::size_t in = in_features;
    for (std::size_t i = 0; i < config.linear_units.size(); ++i) {
      const std::size_t out = config.linear_units[i];
      const std::string p = prefix + "fc" + std::to_string(i);
      dropout(seq, p + ".dropout");
      seq.add<Linear>(p, in, out);
      if (i + 1 < config.linear_units.size()) {
        seq.add<LeakyReLU>(p + ".act", config.leaky_slope);
      } else {
        seq.add<Sigmoid>(p + ".sigmoid");
      }
      in = out;
    }
  }
};

void validate_config(const ArchitectureConfig& c) {
  if (c.conv_filters.empty() || c.linear_units.empty() ||
      c.linear_units.back() != 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "architecture: need conv filters and a classifier ending in 1 unit");
  }
  if (std::find(c.conv_filters.begin(), c.conv_filters.end(), 0u) != c.conv_filters.end() ||
      std::find(c.linear_units.begin(), c.linear_units.end(), 0u) != c.linear_units.end()) {
    throw Error(ErrorCode::kInvalidArgument, "architecture: zero-width layer");
  }
  if (c.input_height == 0 || c.input_width == 0 || c.bands == 0) {
    throw Error(ErrorCode::kInvalidArgument, "architecture: empty input");
  }
}

}  // namespace

std::string_view architecture_name(Architecture arch) {
  switch (arch) {
    case Architecture::kCC: return "cc";
    case Architecture::kSSN: return "ssn";
    case Architecture::kSSC: return "ssc";
    case Architecture::kRCC: return "rcc";
  }
  return "?";
}

Architecture parse_architecture(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (auto a : all_architectures()) {
    if (lower == architecture_name(a)) return a;
  }
  throw Error(ErrorCode::kUnknownArchitecture, "'" + std::string(name) + "'");
}

std::vector<Architecture> all_architectures() {
  return {Architecture::kCC, Architecture::kSSN, Architecture::kSSC,
          Architecture::kRCC};
}

std::size_t reference_parameter_count(Architecture arch) {
  switch (arch) {
    case Architecture::kCC: return 633'219;
    case Architecture::kSSN: return 1'801'621;
    case Architecture::kSSC: return 1'533'321;
    case Architecture::kRCC: return 1'095'171;
  }
  return 0;
}

Model::Model(Architecture arch, ArchitectureConfig config)
    : arch_(arch), config_(std::move(config)) {
  validate_config(config_);
  const bool banded = arch_ == Architecture::kSSN || arch_ == Architecture::kSSC;
  const std::size_t n_branches = banded ? config_.bands : 1;
  if (config_.input_height % n_branches != 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "architecture: input height " + std::to_string(config_.input_height) +
                    " not divisible into " + std::to_string(n_branches) + " bands");
  }
  branch_height_ = config_.input_height / n_branches;

  Builder b{config_};
  const Shape conv_out = [&] {
    Sequential probe("probe");
    Builder pb{config_};
    pb.conv_stack(probe, "", false);
    return probe.output_shape({1, 1, branch_height_, config_.input_width});
  }();
  branch_features_ = conv_out[1] * conv_out[2] * conv_out[3];

  for (std::size_t i = 0; i < n_branches; ++i) {
    const std::string prefix = banded ? "band" + std::to_string(i) + "." : "";
    auto seq = std::make_unique<Sequential>(banded ? "band" + std::to_string(i) : "net");
    b.conv_stack(*seq, prefix, arch_ == Architecture::kRCC);
    seq->add<Flatten>(prefix + "flatten");
    if (arch_ != Architecture::kSSC) b.classifier(*seq, prefix, branch_features_);
    branches_.push_back(std::move(seq));
  }
  if (arch_ == Architecture::kSSN) {
    global_ = std::make_unique<Sequential>("global");
    b.classifier(*global_, "global.", n_branches);
  } else if (arch_ == Architecture::kSSC) {
    global_ = std::make_unique<Sequential>("global");
    b.classifier(*global_, "global.", n_branches * branch_features_);
  }
}

std::size_t Model::num_outputs() const noexcept {
  return arch_ == Architecture::kSSN ? branches_.size() + 1 : 1;
}

Shape Model::conv_output_shape() const {
  Sequential probe("probe");
  Builder pb{config_};
  pb.conv_stack(probe, "", false);
  const Shape s = probe.output_shape({1, 1, branch_height_, config_.input_width});
  return {s[1], s[2], s[3]};
}

std::vector<std::pair<std::size_t, std::size_t>> Model::branch_rows() const {
  std::vector<std::pair<std::size_t, std::size_t>> rows;
  for (std::size_t i = 0; i < branches_.size(); ++i) {
    rows.emplace_back(i * branch_height_, (i + 1) * branch_height_);
  }
  return rows;
}

void Model::check_input(const Tensor& batch) const {
  const Shape& s = batch.shape();
  if (s.size() != 4 || s[0] == 0 || s[1] != 1 || s[2] != config_.input_height ||
      s[3] != config_.input_width) {
    throw Error(ErrorCode::kShapeMismatch,
                "model input must be [N, 1, " + std::to_string(config_.input_height) +
                    ", " + std::to_string(config_.input_width) + "], got " +
                    shape_string(s));
  }
}

Tensor Model::slice_rows(const Tensor& batch, std::size_t branch) const {
  if (branches_.size() == 1) return batch;
  const std::size_t n = batch.dim(0), h = config_.input_height,
                    w = config_.input_width, bh = branch_height_;
  Tensor out({n, 1, bh, w});
  for (std::size_t i = 0; i < n; ++i) {
    const double* src = batch.ptr() + (i * h + branch * bh) * w;
    std::copy(src, src + bh * w, out.ptr() + i * bh * w);
  }
  return out;
}

std::vector<Tensor> Model::forward(const Tensor& batch, const ForwardContext& ctx) {
  check_input(batch);
  const std::size_t n = batch.dim(0);
  if (!global_) return {branches_[0]->forward(batch, ctx)};

  const std::size_t nb = branches_.size();
  const std::size_t width = arch_ == Architecture::kSSN ? 1 : branch_features_;
  std::vector<Tensor> outputs;
  Tensor concat({n, nb * width});
  for (std::size_t b = 0; b < nb; ++b) {
    Tensor o = branches_[b]->forward(slice_rows(batch, b), ctx);
    for (std::size_t i = 0; i < n; ++i) {
      std::copy(o.ptr() + i * width, o.ptr() + (i + 1) * width,
                concat.ptr() + i * nb * width + b * width);
    }
    if (arch_ == Architecture::kSSN) outputs.push_back(std::move(o));
  }
  outputs.push_back(global_->forward(concat, ctx));
  return outputs;
}

Tensor Model::backward(const std::vector<Tensor>& grad_outputs) {
  if (grad_outputs.size() != num_outputs()) {
    throw Error(ErrorCode::kShapeMismatch,
                "model backward: expected " + std::to_string(num_outputs()) +
                    " output gradients, got " + std::to_string(grad_outputs.size()));
  }
  if (!global_) return branches_[0]->backward(grad_outputs[0]);

  const Tensor dcat = global_->backward(grad_outputs.back());
  const std::size_t n = dcat.dim(0);
  const std::size_t nb = branches_.size();
  const std::size_t width = arch_ == Architecture::kSSN ? 1 : branch_features_;
  const std::size_t h = config_.input_height, w = config_.input_width,
                    bh = branch_height_;
  Tensor dx({n, 1, h, w});
  for (std::size_t b = 0; b < nb; ++b) {
    Tensor g({n, width});
    for (std::size_t i = 0; i < n; ++i) {
      std::copy(dcat.ptr() + i * nb * width + b * width,
                dcat.ptr() + i * nb * width + (b + 1) * width, g.ptr() + i * width);
    }
    if (arch_ == Architecture::kSSN) {
      for (std::size_t i = 0; i < n; ++i) g[i] += grad_outputs[b][i];
    }
    const Tensor db = branches_[b]->backward(g);
    for (std::size_t i = 0; i < n; ++i) {
      std::copy(db.ptr() + i * bh * w, db.ptr() + (i + 1) * bh * w,
                dx.ptr() + (i * h + b * bh) * w);
    }
  }
  return dx;
}

std::vector<double> Model::predict(const Tensor& batch) {
  const auto outs = forward(batch, ForwardContext{Mode::kEval});
  return outs.back().storage();
}

void Model::visit(const std::function<void(Layer&)>& fn) {
  for (auto& b : branches_) b->visit(fn);
  if (global_) global_->visit(fn);
}

std::vector<Parameter*> Model::parameters() {
  std::vector<Parameter*> out;
  visit([&](Layer& l) {
    for (auto* p : l.parameters()) out.push_back(p);
  });
  return out;
}

std::vector<Parameter*> Model::buffers() {
  std::vector<Parameter*> out;
  visit([&](Layer& l) {
    for (auto* p : l.buffers()) out.push_back(p);
  });
  return out;
}

void Model::zero_grad() {
  for (auto* p : parameters()) p->grad.fill(0.0);
}

std::size_t Model::parameter_count() {
  std::size_t total = 0;
  for (auto* p : parameters()) total += p->value.numel();
  return total;
}

std::vector<LayerCount> Model::parameter_table() {
  std::vector<LayerCount> rows;
  visit([&](Layer& l) {
    const auto params = l.parameters();
    if (params.empty()) return;
    LayerCount row{l.name(), l.kind(), "", 0};
    for (auto* p : params) {
      if (!row.shapes.empty()) row.shapes += " + ";
      row.shapes += shape_string(p->value.shape());
      row.count += p->value.numel();
    }
    rows.push_back(std::move(row));
  });
  return rows;
}

std::unique_ptr<Model> build_model(Architecture arch,
                                   const ArchitectureConfig& config,
                                   std::uint64_t init_seed) {
  auto model = std::make_unique<Model>(arch, config);
  std::uint64_t index = 0;
  const double gain = std::sqrt(2.0 / (1.0 + config.leaky_slope * config.leaky_slope));
  model->visit([&](Layer& l) {
    Parameter* weight = nullptr;
    if (auto* conv = dynamic_cast<Conv2d*>(&l)) weight = &conv->weight();
    if (auto* lin = dynamic_cast<Linear*>(&l)) weight = &lin->weight();
    if (!weight) return;
    const double fan_in = static_cast<double>(weight->value.dim(1));
    const double sd = gain / std::sqrt(fan_in);
    audio::RandomStream rs(init_seed, {index++, 0, audio::tag_of("init")});
    for (double& v : weight->value.data()) v = audio::draw_gaussian(rs, 0.0, sd);
  });
  return model;
}

}  // namespace melforge::nn
