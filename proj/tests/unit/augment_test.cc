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

#include "melforge/augment/augment.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "melforge/error.h"
#include "test_util.h"

namespace melforge::augment {
namespace {

using audio::RandomStream;
using features::MelSpectrogram;
using testing::random_mel;

audio::Waveform random_wave(std::size_t n, std::uint64_t seed, int sr = 22050) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> d(-0.5, 0.5);
  audio::Waveform w{std::vector<double>(n), sr};
  for (auto& s : w.samples) s = d(gen);
  return w;
}

std::size_t count_nonzero(const MelSpectrogram& m) {
  return static_cast<std::size_t>(
      std::count_if(m.values.data.begin(), m.values.data.end(), [](double v) { return v != 0.0; }));
}

// --- speed -------------------------------------------------------------------

TEST(SpeedTest, ZeroWindowIsIdentity) {
  const auto w = random_wave(22050, 1);
  for (std::uint64_t s = 0; s < 20; ++s) {
    RandomStream rs(s, {});
    EXPECT_EQ(speed_perturb(w, rs, 0.7, 1.7, 0.0).samples, w.samples);
  }
}

TEST(SpeedTest, UnitFactorIsIdentity) {
  const auto w = random_wave(22050, 2);
  EXPECT_EQ(speed_perturb(w, SpeedDraw{100, 0.5, 1.0}).samples, w.samples);
  RandomStream rs(0, {});
  EXPECT_EQ(speed_perturb(w, rs, 1.0, 1.0, 0.3).samples, w.samples);
}

TEST(SpeedTest, WholeClipAtDoubleSpeed) {
  const auto w = random_wave(22050, 3);
  const auto out = speed_perturb(w, SpeedDraw{0, 1.0, 2.0});
  ASSERT_EQ(out.size(), 11025u);
  // Brute-force oracle: output j reads the input at 2j.
  for (std::size_t j = 0; j < out.size(); ++j) EXPECT_EQ(out.samples[j], w.samples[2 * j]);
}

TEST(SpeedTest, WindowedSegmentLengthAndUntouchedEdges) {
  const auto w = random_wave(1000, 4);
  // Segment [200, 500) slowed by 0.75 -> round(300 / 0.75) = 400 samples.
  const auto out = speed_perturb(w, SpeedDraw{200, 0.3, 0.75});
  ASSERT_EQ(out.size(), 1000u - 300u + 400u);
  for (std::size_t i = 0; i < 200; ++i) EXPECT_EQ(out.samples[i], w.samples[i]);
  for (std::size_t i = 0; i < 500; ++i) EXPECT_EQ(out.samples[600 + i], w.samples[500 + i]);
  for (std::size_t j = 0; j < 400; ++j) {
    const double pos = j * 300.0 / 400.0;
    const auto i = static_cast<std::size_t>(pos);
    const double t = pos - i;
    const double next = i + 1 < 300 ? w.samples[200 + i + 1] : w.samples[200 + i];
    EXPECT_NEAR(out.samples[200 + j], (1 - t) * w.samples[200 + i] + t * next, 1e-12);
  }
  // A window running past the end is clamped.
  EXPECT_EQ(speed_perturb(w, SpeedDraw{900, 0.5, 2.0}).size(), 900u + 50u);
}

TEST(SpeedTest, DrawsStayInBounds) {
  RandomStream rs(5, {});
  for (int i = 0; i < 1000; ++i) {
    const auto d = draw_speed(22050, rs, 0.7, 1.7, 0.3);
    ASSERT_LT(d.start, 22050u);
    ASSERT_GE(d.window_fraction, 0.0);
    ASSERT_LT(d.window_fraction, 0.3);
    ASSERT_GE(d.factor, 0.7);
    ASSERT_LT(d.factor, 1.7);
  }
  EXPECT_THROW(draw_speed(10, rs, 0.7, 1.7, 1.5), Error);
  EXPECT_THROW(draw_speed(10, rs, 0.0, 1.7, 0.3), Error);
}

TEST(SpeedTest, FitLength) {
  const auto w = random_wave(100, 6);
  const auto longer = fit_length(w, 120);
  ASSERT_EQ(longer.size(), 120u);
  for (std::size_t i = 100; i < 120; ++i) EXPECT_EQ(longer.samples[i], 0.0);
  const auto shorter = fit_length(w, 50);
  EXPECT_EQ(shorter.samples, std::vector<double>(w.samples.begin(), w.samples.begin() + 50));
}

// --- loudness ----------------------------------------------------------------

TEST(LoudnessTest, FormulaAndIdentity) {
  MelSpectrogram m;
  m.values = features::Matrix(1, 1, 2.0);
  EXPECT_NEAR(loudness(m, 0.4).values(0, 0), 2.8, 1e-15);
  const auto r = random_mel(8, 9, 1);
  EXPECT_EQ(loudness(r, 0.0).values, r.values);
  RandomStream rs(0, {});
  EXPECT_EQ(loudness(r, rs, 0.0).values, r.values);
}

TEST(LoudnessTest, ArgmaxUnchanged) {
  RandomStream rs(7, {});
  for (std::uint64_t s = 0; s < 50; ++s) {
    const auto m = random_mel(16, 20, s, -3.0, 3.0);
    const auto out = loudness(m, rs, 0.4);
    const auto a = std::max_element(m.values.data.begin(), m.values.data.end()) - m.values.data.begin();
    const auto b = std::max_element(out.values.data.begin(), out.values.data.end()) -
                   out.values.data.begin();
    EXPECT_EQ(a, b);
  }
}

TEST(LoudnessTest, LevelIsUniformOnRange) {
  RandomStream rs(8, {});
  MelSpectrogram one;
  one.values = features::Matrix(1, 1, 1.0);
  double sum = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double l = loudness(one, rs, 0.4).values(0, 0) - 1.0;
    ASSERT_GE(l, 0.0);
    ASSERT_LT(l, 0.4);
    sum += l;
  }
  EXPECT_NEAR(sum / n, 0.2, 0.005);
}

// --- shift -------------------------------------------------------------------

TEST(ShiftTest, ZeroFractionIsIdentity) {
  const auto m = random_mel(64, 87, 2);
  RandomStream rs(0, {});
  EXPECT_EQ(shift(m, ShiftDraw{0.0, true}, Fill::kZero, rs).values, m.values);
  EXPECT_EQ(shift(m, ShiftDraw{0.0, false}, Fill::kGaussian, rs).values, m.values);
  EXPECT_EQ(shift(m, rs, 0.0).values, m.values);
}

TEST(ShiftTest, QuarterRight) {
  const auto m = random_mel(64, 87, 3);
  RandomStream rs(0, {});
  const auto out = shift(m, ShiftDraw{0.25, true}, Fill::kZero, rs);
  ASSERT_EQ(out.n_frames(), 87u);
  for (std::size_t r = 0; r < 64; ++r) {
    for (std::size_t c = 0; c < 21; ++c) EXPECT_EQ(out.values(r, c), 0.0);
    for (std::size_t c = 21; c < 87; ++c) EXPECT_EQ(out.values(r, c), m.values(r, c - 21));
  }
}

TEST(ShiftTest, RightThenLeftKeepsMiddle) {
  RandomStream rs(0, {});
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto m = random_mel(10, 87, s);
    const double f = 0.01 * static_cast<double>(s + 1);
    const auto k = static_cast<std::size_t>(std::floor(f * 87));
    const auto back = shift(shift(m, ShiftDraw{f, true}, Fill::kZero, rs), ShiftDraw{f, false},
                            Fill::kZero, rs);
    for (std::size_t r = 0; r < 10; ++r) {
      for (std::size_t c = k; c + k < 87; ++c) EXPECT_EQ(back.values(r, c), m.values(r, c));
    }
  }
}

TEST(ShiftTest, GaussianFillMoments) {
  features::MelSpectrogram m;
  m.values = features::Matrix(64, 100, 5.0);
  RandomStream rs(9, {});
  std::vector<double> fill;
  for (int i = 0; i < 20; ++i) {
    const auto out = shift(m, ShiftDraw{0.5, i % 2 == 0}, Fill::kGaussian, rs);
    for (double v : out.values.data) {
      if (v != 5.0) fill.push_back(v);
    }
  }
  ASSERT_EQ(fill.size(), 20u * 64u * 50u);
  EXPECT_NEAR(testing::mean_of(fill), 0.0, 0.01);
  EXPECT_NEAR(testing::pop_std_of(fill), kFillSigma, 0.01);
}

TEST(ShiftTest, DirectionIsFair) {
  RandomStream rs(10, {});
  int right = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto d = draw_shift(rs, 0.3);
    ASSERT_LT(d.fraction, 0.3);
    right += d.right;
  }
  EXPECT_NEAR(right / 10000.0, 0.5, 0.02);
}

// --- noise -------------------------------------------------------------------

TEST(NoiseTest, ZeroSigmaAndZeroInput) {
  const auto m = random_mel(8, 8, 4);
  RandomStream rs(0, {});
  EXPECT_EQ(noise(m, rs, 0.0).values, m.values);
  features::MelSpectrogram z;
  z.values = features::Matrix(8, 8, 0.0);
  for (double v : noise(z, rs, 0.4).values.data) EXPECT_EQ(v, 0.0);
}

TEST(NoiseTest, MonteCarloMoments) {
  features::MelSpectrogram one;
  one.values = features::Matrix(100, 100, 1.0);
  RandomStream rs(11, {});
  const auto out = noise(one, rs, 0.4);
  EXPECT_NEAR(testing::mean_of(out.values.data), 1.0, 0.02);
  EXPECT_NEAR(testing::pop_std_of(out.values.data), 0.4, 0.02);
}

// --- mask --------------------------------------------------------------------

TEST(MaskTest, ZeroWidthIsIdentity) {
  const auto m = random_mel(64, 87, 5);
  RandomStream rs(0, {});
  EXPECT_EQ(mask(m, MaskDraw{10, 0, 20, 0}, Fill::kZero, rs).values, m.values);
  EXPECT_EQ(mask(m, rs, 0.0).values, m.values);
}

TEST(MaskTest, ForcedTimeMask) {
  const auto m = random_mel(64, 87, 6, 1.0, 2.0);  // no zeros
  RandomStream rs(0, {});
  const auto out = mask(m, MaskDraw{10, 8, 0, 0}, Fill::kZero, rs);
  std::size_t zeros = 0;
  for (std::size_t r = 0; r < 64; ++r) {
    for (std::size_t c = 0; c < 87; ++c) {
      if (out.values(r, c) == 0.0) {
        ++zeros;
        EXPECT_GE(c, 10u);
        EXPECT_LE(c, 17u);
      } else {
        EXPECT_EQ(out.values(r, c), m.values(r, c));
      }
    }
  }
  EXPECT_EQ(zeros, 8u * 64u);
}

TEST(MaskTest, EdgeClamps) {
  const auto m = random_mel(64, 87, 7, 1.0, 2.0);
  RandomStream rs(0, {});
  const auto out = mask(m, MaskDraw{84, 10, 62, 10}, Fill::kZero, rs);
  EXPECT_EQ(64 * 87 - count_nonzero(out), 3u * 64u + 2u * 87u - 3u * 2u);
}

TEST(MaskTest, CountBoundOverRandomDraws) {
  const auto m = random_mel(64, 87, 8, 1.0, 2.0);
  const std::size_t bound = 17 * 64 + 12 * 87;  // floor(0.2*87)*64 + floor(0.2*64)*87
  for (std::uint64_t s = 0; s < 1000; ++s) {
    RandomStream rs(s, {s, 0, 1});
    const auto out = mask(m, rs, 0.2);
    ASSERT_LE(64 * 87 - count_nonzero(out), bound);
  }
}

TEST(ZeroFillTest, NeverAddsNonzeroCells) {
  for (std::uint64_t s = 0; s < 200; ++s) {
    auto m = random_mel(16, 30, s);
    for (std::size_t i = 0; i < m.values.size(); i += 3) m.values.data[i] = 0.0;
    RandomStream rs(s, {});
    EXPECT_LE(count_nonzero(shift(m, rs, 0.5)), count_nonzero(m));
    EXPECT_LE(count_nonzero(mask(m, rs, 0.5)), count_nonzero(m));
  }
}

// --- plans -------------------------------------------------------------------

TEST(PlanTest, ParseRoundTripAndPresets) {
  const auto p = AugmentationPlan::parse("speed:0.3:0.7:1.7,loudness:0.4,shift:0.3:gaussian,noise:0.4,mask:0.2");
  ASSERT_EQ(p.steps.size(), 5u);
  EXPECT_EQ(p.steps[2].fill, Fill::kGaussian);
  EXPECT_EQ(AugmentationPlan::parse(p.to_string()), p);
  EXPECT_EQ(AugmentationPlan::parse("none"), AugmentationPlan{});
  EXPECT_EQ(AugmentationPlan{}.to_string(), "none");
  for (const auto& name : preset_names()) {
    const auto pr = preset(name);
    ASSERT_TRUE(pr.has_value()) << name;
    EXPECT_EQ(AugmentationPlan::parse(name), *pr);
    EXPECT_EQ(AugmentationPlan::parse(pr->to_string()), *pr);
    pr->validate();
  }
  EXPECT_EQ(preset("shift")->steps.at(0).ratio, 0.3);
  EXPECT_EQ(preset("masking")->steps.at(0).ratio, 0.2);
  EXPECT_EQ(preset("combined")->steps.size(), 5u);
  EXPECT_TRUE(preset("raw")->empty());
  EXPECT_FALSE(preset("bogus").has_value());
}

TEST(PlanTest, ValidationAndParseErrors) {
  EXPECT_THROW(AugmentationPlan::parse("shift:0.3,speed:0.3").validate(), Error);
  EXPECT_THROW(AugmentationPlan::parse("speed:0.3,speed:0.2").validate(), Error);
  EXPECT_THROW(AugmentationPlan::parse("mask:1.5").validate(), Error);
  EXPECT_THROW(AugmentationPlan::parse("wobble:0.1"), Error);
  EXPECT_THROW(AugmentationPlan::parse("shift:abc"), Error);
  EXPECT_THROW(AugmentationPlan::parse("shift:0.1:purple"), Error);
}

TEST(PlanTest, StepStreamsAreDistinct) {
  const RandomStream rs(1, {2, 3, 4});
  auto a = step_stream(rs, StepKind::kShift, 0);
  auto b = step_stream(rs, StepKind::kShift, 1);
  auto c = step_stream(rs, StepKind::kMask, 0);
  EXPECT_NE(a.next_u64(), b.next_u64());
  EXPECT_NE(step_stream(rs, StepKind::kShift, 0).next_u64(), c.next_u64());
  EXPECT_EQ(a.id().sample_index, 2u);
  EXPECT_EQ(a.id().epoch_index, 3u);
}

TEST(ApplyPlanTest, EmptyPlanIsPlainExtract) {
  const auto w = random_wave(16000, 12, 16000);
  const features::MelExtractor ex;
  const auto out = apply_plan(w, AugmentationPlan{}, RandomStream(0, {}), ex);
  EXPECT_EQ(out.values, features::normalize_local(ex.log_mel(w)).values);
}

TEST(ApplyPlanTest, DeterministicPerStream) {
  const auto w = random_wave(22050, 13);
  const features::MelExtractor ex;
  const auto plan = AugmentationPlan::parse("shift:0.3");
  const auto a = apply_plan(w, plan, RandomStream(3, {1, 2, 5}), ex);
  const auto b = apply_plan(w, plan, RandomStream(3, {1, 2, 5}), ex);
  EXPECT_EQ(a.values, b.values);
  bool any_diff = false;
  for (std::uint64_t e = 0; e < 10 && !any_diff; ++e) {
    any_diff = apply_plan(w, plan, RandomStream(3, {1, e + 3, 5}), ex).values != a.values;
  }
  EXPECT_TRUE(any_diff);
}

TEST(ApplyPlanTest, CombinedKeepsShapeAndNormalization) {
  const features::MelExtractor ex;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto w = random_wave(16000, 100 + s, 16000);
    const auto out = apply_plan(w, *preset("combined"), RandomStream(s, {s, 1, 0}), ex);
    EXPECT_EQ(out.n_mels(), 64u);
    EXPECT_EQ(out.n_frames(), 87u);
    EXPECT_TRUE(features::is_locally_normalized(out));
  }
}

}  // namespace
}  // namespace melforge::augment
