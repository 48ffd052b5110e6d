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

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>
#include <tuple>

#include "gtest/gtest.h"
#include "melforge/audio/wav.h"
#include "melforge/data/cache.h"
#include "melforge/data/manifest.h"
#include "melforge/data/synth.h"
#include "melforge/data/training_set.h"
#include "melforge/error.h"
#include "melforge/features/image.h"
#include "test_util.h"

namespace melforge::data {
namespace {

ErrorCode code_of(const std::function<void()>& fn, std::string* message = nullptr) {
  try {
    fn();
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kIoError;
}

Manifest small_manifest(std::size_t n_train, std::size_t n_devel = 0) {
  Manifest m;
  for (std::size_t i = 0; i < n_train + n_devel; ++i) {
    m.entries.push_back({"c" + std::to_string(i), "c" + std::to_string(i) + ".wav",
                         i % 2 ? Label::kMask : Label::kClear,
                         i < n_train ? Split::kTrain : Split::kDevel});
  }
  return m;
}

TEST(ManifestTest, ParsesRowsAndDefaultsSplit) {
  const auto m = parse_manifest("file_name,label\na.wav,clear\nsub/b.wav,mask\n", "/data");
  ASSERT_EQ(m.entries.size(), 2u);
  EXPECT_EQ(m.entries[0].clip_id, "a");
  EXPECT_EQ(m.entries[1].path, std::filesystem::path("/data/sub/b.wav"));
  EXPECT_EQ(m.entries[1].label, Label::kMask);
  EXPECT_EQ(m.count(Split::kTrain), 2u);
  const auto s = parse_manifest("file_name,label,split\r\na.wav,clear,devel\r\nb.wav,mask,test\r\n", "");
  EXPECT_EQ(s.entries[0].split, Split::kDevel);
  EXPECT_EQ(s.indices(Split::kTest), std::vector<std::size_t>{1});
}

TEST(ManifestTest, Errors) {
  std::string msg;
  EXPECT_EQ(code_of([] { parse_manifest("file_name,label\na.wav,clear\nx/a.wav,mask\n", ""); },
                    &msg),
            ErrorCode::kDuplicateClipId);
  EXPECT_NE(msg.find("'a'"), std::string::npos) << msg;
  EXPECT_EQ(code_of([] { parse_manifest("file_name,label\na.wav,clear\nb.wav,maks\n", ""); },
                    &msg),
            ErrorCode::kUnknownLabel);
  EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
  EXPECT_EQ(code_of([] { parse_manifest("name,label\n", ""); }), ErrorCode::kParseError);
  EXPECT_EQ(code_of([] { parse_manifest("file_name,label\na.wav\n", ""); }, &msg),
            ErrorCode::kParseError);
  EXPECT_NE(msg.find("line 2"), std::string::npos) << msg;
  EXPECT_EQ(code_of([] { parse_manifest("file_name,label,split\na.wav,clear,dev\n", ""); }),
            ErrorCode::kParseError);
}

TEST(ManifestTest, LoadChecksPathsAndWriteRoundTrips) {
  testing::TempDir dir("manifest");
  audio::write_wav(dir / "a.wav", audio::Waveform{{0.0}, 16000});
  {
    std::ofstream out(dir / "m.csv");
    out << "file_name,label\na.wav,clear\n";
  }
  const auto m = load_manifest(dir / "m.csv");
  EXPECT_EQ(m.entries.at(0).path, dir / "a.wav");
  write_manifest(dir / "m2.csv", m);
  const auto m2 = load_manifest(dir / "m2.csv");
  EXPECT_EQ(m2.entries.at(0).path, m.entries.at(0).path);
  EXPECT_EQ(m2.entries.at(0).split, Split::kTrain);
  {
    std::ofstream out(dir / "bad.csv");
    out << "file_name,label\nmissing.wav,clear\n";
  }
  EXPECT_EQ(code_of([&] { load_manifest(dir / "bad.csv"); }), ErrorCode::kNotFound);
}

TEST(TrainingSetTest, Quadruples) {
  const auto ts = expand_training_set(small_manifest(10, 3), 5);
  ASSERT_EQ(ts.items.size(), 40u);
  std::set<std::pair<std::string, int>> seen;
  std::set<std::tuple<std::uint64_t, std::uint64_t, std::uint64_t>> streams;
  std::size_t masks = 0;
  for (const auto& item : ts.items) {
    seen.insert({item.clip_id, item.variant});
    masks += item.label == Label::kMask;
    EXPECT_LT(item.entry_index, 10u);
    if (item.variant > 0) {
      const auto& id = item.speed_stream;
      streams.insert({id.sample_index, id.epoch_index, id.step_tag});
    }
  }
  EXPECT_EQ(seen.size(), 40u);
  EXPECT_EQ(masks, 20u);
  EXPECT_EQ(streams.size(), 30u);
  const auto again = expand_training_set(small_manifest(10, 3), 5);
  for (std::size_t i = 0; i < 40; ++i) EXPECT_EQ(again.items[i].speed_stream, ts.items[i].speed_stream);
  EXPECT_EQ(code_of([] { expand_training_set(small_manifest(0, 3), 0); }),
            ErrorCode::kEmptyTrainSplit);
}

TEST(BatchesTest, SizesAndDeterminism) {
  auto sizes = [](std::size_t n, std::size_t b) {
    std::vector<std::size_t> out;
    for (const auto& batch : batches(n, 1, 0, b)) out.push_back(batch.size());
    return out;
  };
  EXPECT_EQ(sizes(400, 200), (std::vector<std::size_t>{200, 200}));
  EXPECT_EQ(sizes(450, 200), (std::vector<std::size_t>{200, 200, 50}));
  const auto a = batches(450, 3, 9, 200);
  EXPECT_EQ(a, batches(450, 3, 9, 200));
  EXPECT_NE(a, batches(450, 4, 9, 200));
  EXPECT_NE(a, batches(450, 3, 10, 200));
  std::vector<std::size_t> all;
  for (const auto& b : a) all.insert(all.end(), b.begin(), b.end());
  std::sort(all.begin(), all.end());
  std::vector<std::size_t> expected(450);
  std::iota(expected.begin(), expected.end(), 0);
  EXPECT_EQ(all, expected);
}

class CorpusTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new testing::TempDir("corpus");
    SynthOptions opts;
    opts.n_per_class = 10;
    opts.seed = 3;
    manifest_ = new Manifest(synth_corpus(opts, dir_->path()));
  }
  static void TearDownTestSuite() {
    delete manifest_;
    delete dir_;
  }
  static testing::TempDir* dir_;
  static Manifest* manifest_;
};
testing::TempDir* CorpusTest::dir_ = nullptr;
Manifest* CorpusTest::manifest_ = nullptr;

TEST_F(CorpusTest, SplitArithmetic) {
  EXPECT_EQ(manifest_->entries.size(), 20u);
  EXPECT_EQ(manifest_->count(Split::kTrain), 16u);
  EXPECT_EQ(manifest_->count(Split::kDevel), 4u);
  const auto loaded = load_manifest(dir_->path() / "manifest.csv");
  EXPECT_EQ(loaded.entries.size(), 20u);
  const auto w = audio::read_wav(loaded.entries[0].path);
  EXPECT_EQ(w.sample_rate, 16000);
  EXPECT_EQ(w.size(), 16000u);
}

TEST_F(CorpusTest, CacheCardinalityDeterminismAndPlainExtract) {
  testing::TempDir cache("cache");
  auto ts = expand_training_set(*manifest_, 4);
  const auto index = build_cache(ts, *manifest_, cache.path());
  ASSERT_EQ(index.train.size(), 64u);
  EXPECT_EQ(index.devel.size(), 4u);
  EXPECT_EQ(index.written, 68u);
  std::size_t pgms = 0;
  for (const auto& e : std::filesystem::directory_iterator(index.train_dir)) {
    pgms += e.path().extension() == ".pgm";
  }
  EXPECT_EQ(pgms, 64u);
  EXPECT_EQ(read_cache_index(index.train_dir / "index.tsv").size(), 64u);
  const auto first = testing::read_bytes(ts.items[5].cached_image);

  // Variant 0 equals a plain extraction.
  const features::MelExtractor ex;
  for (const auto& item : ts.items) {
    if (item.variant != 0) continue;
    const auto plain = features::quantize_u8(ex.log_mel(audio::read_wav(manifest_->entries[item.entry_index].path)));
    EXPECT_EQ(features::read_cached_image(item.cached_image), plain);
  }

  // Rebuilding is a no-op; a fresh rebuild (two workers) is byte-identical.
  auto ts2 = expand_training_set(*manifest_, 4);
  EXPECT_EQ(build_cache(ts2, *manifest_, cache.path()).written, 0u);
  testing::TempDir cache2("cache2");
  CacheOptions opts;
  opts.jobs = 2;
  auto ts3 = expand_training_set(*manifest_, 4);
  build_cache(ts3, *manifest_, cache2.path(), opts);
  for (std::size_t i = 0; i < ts.items.size(); ++i) {
    EXPECT_EQ(testing::read_bytes(ts3.items[i].cached_image), testing::read_bytes(ts.items[i].cached_image));
  }
  EXPECT_EQ(testing::read_bytes(ts.items[5].cached_image), first);
  EXPECT_EQ(testing::read_text(cache.path() / "seed-4" / "index.tsv"),
            testing::read_text(cache2.path() / "seed-4" / "index.tsv"));

  // Speed variants differ from the raw image for at least one clip.
  bool differs = false;
  for (std::size_t i = 0; i + 3 < ts.items.size(); i += 4) {
    differs = differs || features::read_cached_image(ts.items[i].cached_image) !=
                             features::read_cached_image(ts.items[i + 1].cached_image);
  }
  EXPECT_TRUE(differs);
}

TEST_F(CorpusTest, SameSeedSameBytes) {
  testing::TempDir other("corpus2");
  SynthOptions opts;
  opts.n_per_class = 10;
  opts.seed = 3;
  synth_corpus(opts, other.path());
  for (const auto& e : manifest_->entries) {
    EXPECT_EQ(testing::read_bytes(other.path() / "wav" / e.path.filename()), testing::read_bytes(e.path));
  }
  EXPECT_EQ(testing::read_text(other / "manifest.csv"), testing::read_text(dir_->path() / "manifest.csv"));
}

TEST_F(CorpusTest, MaskClipsHaveLessHighBandEnergy) {
  const features::MelExtractor ex;
  double clear = 0.0, mask = 0.0;
  std::size_t n_clear = 0, n_mask = 0;
  for (const auto& e : manifest_->entries) {
    const auto m = ex.log_mel(audio::read_wav(e.path));
    double s = 0.0;
    for (std::size_t r = 48; r < 64; ++r) {
      for (std::size_t c = 0; c < m.n_frames(); ++c) s += m.values(r, c);
    }
    s /= 16.0 * m.n_frames();
    (e.label == Label::kMask ? mask : clear) += s;
    (e.label == Label::kMask ? n_mask : n_clear) += 1;
  }
  EXPECT_LT(mask / n_mask, clear / n_clear);
}

TEST(SynthTest, ClipsAreBoundedAndDistinct) {
  const auto a = synth_clip(Label::kClear, 1, 0);
  const auto b = synth_clip(Label::kClear, 1, 1);
  const auto c = synth_clip(Label::kMask, 1, 0);
  EXPECT_EQ(a.size(), 16000u);
  EXPECT_NE(a.samples, b.samples);
  EXPECT_NE(a.samples, c.samples);
  for (double s : a.samples) EXPECT_LE(std::abs(s), 1.0);
  EXPECT_EQ(synth_clip(Label::kMask, 1, 0).samples, c.samples);
}

}  // namespace
}  // namespace melforge::data
