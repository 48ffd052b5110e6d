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

#include "melforge/pipeline/report.h"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "json.hpp"
#include "melforge/error.h"

namespace melforge::pipeline {
namespace {

using nlohmann::ordered_json;

}  // namespace

std::string format_mean_std(double mean, double std) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f ± %.2f", mean, std);
  return buf;
}

SeedSummary summarize(const std::vector<RunResult>& runs) {
  if (runs.empty()) throw Error(ErrorCode::kEmpty, "summarize: no runs");
  SeedSummary s;
  s.arch = nn::architecture_name(runs.front().arch);
  s.plan_label = runs.front().plan_label;
  s.n_seeds = runs.size();
  double sum = 0.0;
  for (const auto& r : runs) sum += 100.0 * r.best_uar;
  s.mean = sum / static_cast<double>(runs.size());
  double sq = 0.0;
  for (const auto& r : runs) sq += (100.0 * r.best_uar - s.mean) * (100.0 * r.best_uar - s.mean);
  s.std = std::sqrt(sq / static_cast<double>(runs.size()));
  s.formatted = format_mean_std(s.mean, s.std);
  return s;
}

std::string run_record(const RunConfig& config, const RunResult& run) {
  ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["record"] = "run";
  j["seed"] = run.seed;
  j["arch"] = nn::architecture_name(run.arch);
  j["plan"] = run.plan;
  j["plan_label"] = run.plan_label;
  j["best_uar"] = run.best_uar;
  j["epoch_of_best"] = run.epoch_of_best;
  j["param_count"] = run.param_count;
  auto loss = ordered_json::array();
  auto uar = ordered_json::array();
  for (const auto& e : run.epochs) {
    loss.push_back(e.train_loss);
    uar.push_back(e.devel_uar);
  }
  j["train_loss"] = loss;
  j["devel_uar"] = uar;
  j["epochs"] = config.epochs;
  j["batch_size"] = config.batch_size;
  j["lr"] = config.lr;
  j["weight_decay"] = config.weight_decay;
  j["checkpoint"] = run.checkpoint.filename().string();
  return j.dump();
}

std::string summary_record(const RunConfig& config, const SeedSummary& summary) {
  ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["record"] = "summary";
  j["arch"] = summary.arch;
  j["plan"] = config.plan.to_string();
  j["plan_label"] = summary.plan_label;
  j["n_seeds"] = summary.n_seeds;
  j["mean_uar"] = summary.mean;
  j["std_uar"] = summary.std;
  j["uar"] = summary.formatted;
  return j.dump();
}

void append_report(const std::filesystem::path& path, const RunConfig& config,
                  const std::vector<RunResult>& runs) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write report " + path.string());
  for (const auto& r : runs) out << run_record(config, r) << "\n";
  out << summary_record(config, summarize(runs)) << "\n";
  if (!out) throw Error(ErrorCode::kIoError, "failed writing report " + path.string());
}

}  // namespace melforge::pipeline
