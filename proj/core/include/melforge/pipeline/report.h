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

#ifndef MELFORGE_PIPELINE_REPORT_H_
#define MELFORGE_PIPELINE_REPORT_H_

#include <filesystem>
#include <string>
#include <vector>

#include "melforge/pipeline/trainer.h"

namespace melforge::pipeline {

inline constexpr int kReportSchemaVersion = 1;

struct SeedSummary {
  std::string arch;
  std::string plan_label;
  std::size_t n_seeds = 0;
  double mean = 0.0;  // percent
  double std = 0.0;   // population, percent
  std::string formatted;  // "68.20 ± 0.44"
};

// Mean and population std of best devel UAR, in percent.
SeedSummary summarize(const std::vector<RunResult>& runs);

// "%.2f ± %.2f".
std::string format_mean_std(double mean, double std);

// One JSON object per line, no trailing newline.
std::string run_record(const RunConfig& config, const RunResult& run);
std::string summary_record(const RunConfig& config, const SeedSummary& summary);

// Appends one record per run and then their summary. Existing lines are
// never rewritten.
void append_report(const std::filesystem::path& path, const RunConfig& config,
                  const std::vector<RunResult>& runs);

}  // namespace melforge::pipeline

#endif  // MELFORGE_PIPELINE_REPORT_H_
