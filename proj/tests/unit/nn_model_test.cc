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

#include <cmath>

#include "gradcheck.h"
#include "gtest/gtest.h"
#include "melforge/error.h"
#include "melforge/nn/checkpoint.h"
#include "melforge/nn/loss.h"
#include "melforge/nn/optim.h"
#include "test_util.h"

namespace melforge::nn {
namespace {

using testing::random_tensor;

// --- parameter-count oracle --------------------------------------------------
// Closed-form counts: conv out*(in*9)+out, linear in*out+out, batchnorm 2c.

std::size_t conv_count(std::size_t in, std::size_t out) { return out * in * 9 + out; }
std::size_t lin_count(std::size_t in, std::size_t out) { return in * out + out; }
std::size_t strided(std::size_t n) { return (n + 2 * 2 - 3) / 2 + 1; }

struct StackCount {
  std::size_t params = 0;
  std::size_t flat = 0;
};

StackCount conv_stack(std::size_t h, std::size_t w, bool residual) {
  const std::size_t filters[] = {32, 64, 128, 64};
  StackCount s;
  std::size_t in = 1;
  for (std::size_t f : filters) {
    s.params += conv_count(in, f) + 2 * f;
    if (residual) s.params += 2 * (conv_count(f, f) + 2 * f);
    h = strided(h);
    w = strided(w);
    in = f;
  }
  s.flat = in * h * w;
  return s;
}

std::size_t classifier(std::size_t in) {
  return lin_count(in, 128) + lin_count(128, 256) + lin_count(256, 128) + lin_count(128, 1);
}

std::size_t oracle_count(Architecture arch) {
  switch (arch) {
    case Architecture::kCC: {
      const auto s = conv_stack(64, 87, false);
      return s.params + classifier(s.flat);
    }
    case Architecture::kRCC: {
      const auto s = conv_stack(64, 87, true);
      return s.params + classifier(s.flat);
    }
    case Architecture::kSSN: {
      const auto s = conv_stack(16, 87, false);
      return 4 * (s.params + classifier(s.flat)) + classifier(4);
    }
    case Architecture::kSSC: {
      const auto s = conv_stack(16, 87, false);
      return 4 * s.params + classifier(4 * s.flat);
    }
  }
  return 0;
}

TEST(ParameterCountTest, SingleConv) { EXPECT_EQ(conv_count(1, 32), 320u); }

TEST(ParameterCountTest, FlattenSize) {
  EXPECT_EQ(conv_stack(64, 87, false).flat, 3072u);
  auto model = build_model(Architecture::kCC);
  EXPECT_EQ(model->conv_output_shape(), (Shape{64, 6, 8}));
}

TEST(ParameterCountTest, MatchesOracleForEveryArchitecture) {
  EXPECT_EQ(oracle_count(Architecture::kCC), 626433u);
  for (auto arch : all_architectures()) {
    auto model = build_model(arch);
    EXPECT_EQ(model->parameter_count(), oracle_count(arch)) << architecture_name(arch);
    std::size_t table_sum = 0;
    for (const auto& row : model->parameter_table()) table_sum += row.count;
    EXPECT_EQ(table_sum, model->parameter_count());
    std::size_t direct = 0;
    for (auto* p : model->parameters()) direct += p->value.numel();
    EXPECT_EQ(direct, model->parameter_count());
  }
}

TEST(ParameterCountTest, ReferenceTotals) {
  EXPECT_EQ(reference_parameter_count(Architecture::kCC), 633219u);
  EXPECT_EQ(reference_parameter_count(Architecture::kSSN), 1801621u);
  EXPECT_EQ(reference_parameter_count(Architecture::kSSC), 1533321u);
  EXPECT_EQ(reference_parameter_count(Architecture::kRCC), 1095171u);
}

TEST(ArchitectureTest, ParseNames) {
  EXPECT_EQ(parse_architecture("CC"), Architecture::kCC);
  EXPECT_EQ(parse_architecture("rcc"), Architecture::kRCC);
  try {
    parse_architecture("vgg");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownArchitecture);
  }
}

TEST(ArchitectureTest, BandsTileTheInput) {
  for (auto arch : {Architecture::kSSN, Architecture::kSSC}) {
    auto model = build_model(arch);
    const auto rows = model->branch_rows();
    ASSERT_EQ(rows.size(), 4u);
    std::size_t next = 0;
    for (auto [a, b] : rows) {
      EXPECT_EQ(a, next);
      EXPECT_EQ(b - a, 16u);
      next = b;
    }
    EXPECT_EQ(next, 64u);
  }
  EXPECT_EQ(build_model(Architecture::kSSN)->num_outputs(), 5u);
  EXPECT_EQ(build_model(Architecture::kSSC)->num_outputs(), 1u);
}

TEST(ArchitectureTest, OutputsAreProbabilitiesAndEvalIsDeterministic) {
  const Tensor x = random_tensor({2, 1, 64, 87}, 1);
  for (auto arch : all_architectures()) {
    auto model = build_model(arch, {}, 4);
    const auto outs = model->forward(x, ForwardContext{});
    ASSERT_EQ(outs.size(), model->num_outputs());
    for (const auto& o : outs) {
      EXPECT_EQ(o.shape(), (Shape{2, 1}));
      for (double v : o.storage()) {
        EXPECT_GT(v, 0.0);
        EXPECT_LT(v, 1.0);
      }
    }
    EXPECT_EQ(model->predict(x), model->predict(x));
    EXPECT_EQ(model->predict(x), outs.back().storage());
  }
  auto cc = build_model(Architecture::kCC);
  EXPECT_THROW(cc->forward(Tensor({1, 1, 32, 87}), ForwardContext{}), Error);
}

TEST(LossTest, SsnAllHalfIsLn2) {
  std::vector<Tensor> outs(5, Tensor({3, 1}, 0.5));
  const auto r = model_loss(outs, std::vector<double>{0.0, 1.0, 1.0});
  EXPECT_NEAR(r.value, std::log(2.0), 1e-15);
  ASSERT_EQ(r.grads.size(), 5u);
  // Each output carries 1/5 of the mean-BCE gradient.
  EXPECT_NEAR(r.grads[0][1], -1.0 / 0.5 / 3.0 / 5.0, 1e-12);
}

// Tiny configurations small enough to difference every parameter.
ArchitectureConfig tiny_config() {
  ArchitectureConfig c;
  c.input_height = 8;
  c.input_width = 10;
  c.conv_filters = {2, 3, 2, 2};
  c.linear_units = {3, 4, 3, 1};
  return c;
}

class ArchitectureGradTest : public ::testing::TestWithParam<Architecture> {};

TEST_P(ArchitectureGradTest, MatchesFiniteDifferences) {
  auto model = build_model(GetParam(), tiny_config(), 17);
  Tensor x = random_tensor({3, 1, 8, 10}, 18);
  const std::vector<double> labels{0.0, 1.0, 1.0};
  const ForwardContext ctx{Mode::kTrain, 5, 2, 1};
  auto loss = [&]() { return model_loss(model->forward(x, ctx), labels).value; };

  model->zero_grad();
  const auto r = model_loss(model->forward(x, ctx), labels);
  const Tensor dx = model->backward(r.grads);

  testing::GradReport rep;
  testing::check_entries("input", x, dx, loss, rep);
  for (auto* p : model->parameters()) {
    const Tensor g = p->grad;
    testing::check_entries(p->name, p->value, g, loss, rep, 100000);
  }
  EXPECT_GT(rep.checked, model->parameter_count());
  EXPECT_LT(rep.max_error, testing::kFdTolerance) << rep.worst;
}

INSTANTIATE_TEST_SUITE_P(All, ArchitectureGradTest,
                         ::testing::Values(Architecture::kCC, Architecture::kSSN,
                                           Architecture::kSSC, Architecture::kRCC),
                         [](const auto& info) {
                           return std::string(architecture_name(info.param));
                         });

TEST(TrainingTest, LossDecreasesOnFixedBatch) {
  // Separable batch: positives carry extra energy in the top 16 mel rows.
  Tensor x = random_tensor({8, 1, 64, 87}, 21);
  std::vector<double> labels(8);
  for (std::size_t n = 0; n < 8; ++n) {
    labels[n] = n % 2 == 0 ? 1.0 : 0.0;
    if (labels[n] == 1.0) {
      for (std::size_t i = 48 * 87; i < 64 * 87; ++i) x[n * 64 * 87 + i] += 2.0;
    }
  }
  auto model = build_model(Architecture::kCC, {}, 3);
  Adam adam(model->parameters(), AdamConfig{});
  const ForwardContext ctx{Mode::kTrain, 1, 0, 1};
  double prev = 1e300;
  for (int step = 0; step < 10; ++step) {
    adam.zero_grad();
    const auto r = model_loss(model->forward(x, ctx), labels);
    EXPECT_LT(r.value, prev) << "step " << step;
    prev = r.value;
    model->backward(r.grads);
    adam.step();
  }
}

TEST(CheckpointTest, RoundTripPreservesPredictions) {
  testing::TempDir dir("ckpt");
  for (auto arch : all_architectures()) {
    auto model = build_model(arch, tiny_config(), 2);
    // Move running statistics off their defaults.
    model->forward(random_tensor({4, 1, 8, 10}, 3), ForwardContext{Mode::kTrain, 0, 0, 0});
    const auto path = dir / (std::string(architecture_name(arch)) + ".ckpt");
    save_checkpoint(path, *model, {{"epoch", "7"}, {"note", "a b=c"}});
    EXPECT_TRUE(std::filesystem::exists(path.string() + ".manifest"));
    auto loaded = load_checkpoint(path);
    EXPECT_EQ(loaded.model->architecture(), arch);
    EXPECT_EQ(loaded.model->config(), tiny_config());
    EXPECT_EQ(loaded.metadata.at("epoch"), "7");
    EXPECT_EQ(loaded.metadata.at("note"), "a b=c");
    const Tensor x = random_tensor({2, 1, 8, 10}, 4);
    EXPECT_EQ(loaded.model->predict(x), model->predict(x));
    save_checkpoint(dir / "again.ckpt", *loaded.model, loaded.metadata);
    EXPECT_EQ(testing::read_bytes(dir / "again.ckpt"), testing::read_bytes(path));
  }
}

TEST(CheckpointTest, RejectsCorruptFiles) {
  testing::TempDir dir("ckpt-bad");
  EXPECT_THROW(load_checkpoint(dir / "missing.ckpt"), Error);
  {
    std::ofstream out(dir / "junk.ckpt", std::ios::binary);
    out << "not a checkpoint";
  }
  EXPECT_THROW(load_checkpoint(dir / "junk.ckpt"), Error);
  auto model = build_model(Architecture::kCC, tiny_config());
  save_checkpoint(dir / "ok.ckpt", *model);
  auto bytes = testing::read_bytes(dir / "ok.ckpt");
  bytes.resize(bytes.size() - 5);
  {
    std::ofstream out(dir / "cut.ckpt", std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }
  EXPECT_THROW(load_checkpoint(dir / "cut.ckpt"), Error);
}

}  // namespace
}  // namespace melforge::nn
