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

#include <sstream>
#include <string>
#include <vector>

#include "commands.h"
#include "gtest/gtest.h"
#include "melforge/features/image.h"
#include "test_util.h"

namespace melforge::cli {
namespace {

struct Result {
  int code = 0;
  std::string out, err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "melforge");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Result r;
  r.code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::size_t count_files(const std::filesystem::path& dir, const std::string& ext) {
  std::size_t n = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir)) n += e.path().extension() == ext;
  return n;
}

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new testing::TempDir("cli");
    const auto r = run_cli({"synth", "--n", "100", "--seed", "7", "--out", (dir_->path() / "data").string()});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  static void TearDownTestSuite() { delete dir_; }
  static std::filesystem::path data() { return dir_->path() / "data"; }
  static testing::TempDir* dir_;
};
testing::TempDir* CliTest::dir_ = nullptr;

TEST_F(CliTest, SynthWritesCorpusAndIsIdempotent) {
  EXPECT_EQ(count_files(data() / "wav", ".wav"), 200u);
  const auto before = testing::read_bytes(data() / "wav" / "mask_0003.wav");
  const auto r = run_cli({"synth", "--n", "100", "--seed", "7", "--out", data().string()});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("manifest.csv"), std::string::npos);
  EXPECT_EQ(count_files(data() / "wav", ".wav"), 200u);
  EXPECT_EQ(testing::read_bytes(data() / "wav" / "mask_0003.wav"), before);
}

TEST_F(CliTest, SynthFailsOnUnwritableDirectory) {
  { std::ofstream f(dir_->path() / "plainfile"); f << "x"; }
  const auto r = run_cli({"synth", "--n", "2", "--out", (dir_->path() / "plainfile" / "sub").string()});
  EXPECT_NE(r.code, 0);
  EXPECT_FALSE(r.err.empty());
}

TEST_F(CliTest, PreviewWritesRawPlusOnePerStep) {
  const auto clip = (data() / "wav" / "clear_0000.wav").string();
  const auto out = dir_->path() / "preview-all";
  auto r = run_cli({"preview", "--clip", clip, "--plan", "combined", "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(count_files(out, ".pgm"), 6u);
  for (const auto& e : std::filesystem::directory_iterator(out)) {
    if (e.path().extension() != ".pgm") continue;
    const auto g = features::read_cached_image(e.path());
    EXPECT_EQ(g.rows, 64u);
    EXPECT_EQ(g.cols, 87u);
  }
  const auto none = dir_->path() / "preview-none";
  r = run_cli({"preview", "--clip", clip, "--plan", "none", "--out", none.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(count_files(none, ".pgm"), 1u);
  r = run_cli({"preview", "--clip", (data() / "nope.wav").string(), "--out", none.string()});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("nope.wav"), std::string::npos) << r.err;
}

TEST_F(CliTest, ParamsTotalEqualsRowSum) {
  for (const char* arch : {"cc", "ssn", "ssc", "rcc"}) {
    const auto r = run_cli({"params", "--arch", arch});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream lines(r.out);
    std::string line;
    std::size_t sum = 0, total = 0, rows = 0;
    while (std::getline(lines, line)) {
      if (line.rfind("  ", 0) == 0) {
        sum += std::stoul(line.substr(line.find_last_of(' ') + 1));
        ++rows;
      } else if (line.rfind("total ", 0) == 0) {
        total = std::stoul(line.substr(6));
      }
    }
    EXPECT_GT(rows, 8u);
    EXPECT_EQ(sum, total) << arch;
    EXPECT_NE(r.out.find("deviation"), std::string::npos);
  }
  EXPECT_NE(run_cli({"params", "--arch", "lstm"}).code, 0);
}

TEST_F(CliTest, ConfigFileWithFlagOverrides) {
  const auto conf = dir_->path() / "run.conf";
  {
    std::ofstream f(conf);
    f << "manifest = " << (data() / "manifest.csv").string() << "\n"
      << "cache_dir = " << (dir_->path() / "cache").string() << "\nseeds = 0, 1\n";
  }
  const auto r = run_cli({"extract", "--config", conf.string(), "--seeds", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("seed 2: 640 train images, 40 devel images"), std::string::npos) << r.out;
  EXPECT_EQ(r.out.find("seed 0"), std::string::npos);
  EXPECT_TRUE(std::filesystem::exists(dir_->path() / "cache" / "seed-2" / "index.tsv"));
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_NE(run_cli({}).code, 0);
  EXPECT_NE(run_cli({"frobnicate"}).code, 0);
  EXPECT_NE(run_cli({"train"}).code, 0);  // no manifest
  EXPECT_NE(run_cli({"train", "--manifest", "x.csv", "--epochs", "ten"}).code, 0);
  EXPECT_EQ(run_cli({"--help"}).code, 0);
}

}  // namespace
}  // namespace melforge::cli
