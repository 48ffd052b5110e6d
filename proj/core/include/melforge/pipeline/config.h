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

#ifndef MELFORGE_PIPELINE_CONFIG_H_
#define MELFORGE_PIPELINE_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "melforge/augment/plan.h"
#include "melforge/nn/model.h"

namespace melforge::pipeline {

// Everything a run needs. Defaults are the published training setup.
//
// File format: one "key = value" per line; '#' starts a comment; blank lines
// are ignored; list values are comma-separated. Keys:
//
//   seeds         list of unsigned integers (alias: seed)
//   manifest      path to the manifest CSV
//   cache_dir     cache root (env MELFORGE_CACHE overrides the default)
//   out_dir       checkpoint directory
//   report        JSON-lines report path
//   plan          preset name or augmentation step list (see plan.h)
//   arch          cc | ssn | ssc | rcc
//   epochs, batch_size, jobs   unsigned integers
//   lr, weight_decay           reals
//
// Relative paths in a file are kept as written.
struct RunConfig {
  std::vector<std::uint64_t> seeds{0};
  std::filesystem::path manifest;
  std::filesystem::path cache_dir = "cache";
  std::filesystem::path out_dir = "runs";
  std::filesystem::path report = "report.jsonl";
  augment::AugmentationPlan plan;
  nn::Architecture arch = nn::Architecture::kCC;
  std::size_t epochs = 51;
  std::size_t batch_size = 200;
  double lr = 1e-4;
  double weight_decay = 0.0;
  unsigned jobs = 1;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// Sets one field from its text form; throws kParseError for unknown keys or
// malformed values.
void set_config_value(RunConfig& config, std::string_view key, std::string_view value);

RunConfig parse_config(std::string_view text, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});
std::string serialize_config(const RunConfig& config);
void save_config(const std::filesystem::path& path, const RunConfig& config);

// Applies MELFORGE_CACHE to cache_dir when the variable is set.
void apply_environment(RunConfig& config);

// Short label for file names: the preset name if the plan equals a preset,
// otherwise "custom".
std::string plan_label(const augment::AugmentationPlan& plan);

}  // namespace melforge::pipeline

#endif  // MELFORGE_PIPELINE_CONFIG_H_
