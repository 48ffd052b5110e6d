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

#include "commands.h"

#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "melforge/audio/random.h"
#include "melforge/audio/wav.h"
#include "melforge/augment/augment.h"
#include "melforge/data/cache.h"
#include "melforge/data/synth.h"
#include "melforge/error.h"
#include "melforge/features/image.h"
#include "melforge/format.h"
#include "melforge/metrics/metrics.h"
#include "melforge/nn/checkpoint.h"
#include "melforge/pipeline/config.h"
#include "melforge/pipeline/report.h"
#include "melforge/pipeline/trainer.h"

namespace melforge::cli {
namespace {

namespace fs = std::filesystem;
using pipeline::RunConfig;

// Flag values are kept as text and applied through the config parser so the
// command line and the config file share one grammar.
struct ConfigFlags {
  std::string config_file;
  std::vector<std::pair<std::string, std::string>> values;
  std::vector<std::pair<std::string, CLI::Option*>> options;

  void add(CLI::App* app, const std::string& flag, const std::string& key,
           const std::string& help) {
    auto& slot = values.emplace_back(key, std::string());
    options.emplace_back(key, app->add_option(flag, slot.second, help));
  }

  RunConfig resolve() const {
    RunConfig c;
    if (!config_file.empty()) c = pipeline::load_config(config_file);
    pipeline::apply_environment(c);
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (options[i].second->count() > 0) {
        pipeline::set_config_value(c, values[i].first, values[i].second);
      }
    }
    return c;
  }
};

void add_run_flags(CLI::App* app, ConfigFlags& f) {
  // Reserve so slot references stay valid.
  f.values.reserve(16);
  f.options.reserve(16);
  app->add_option("--config", f.config_file, "key = value run config file");
  f.add(app, "--seeds", "seeds", "comma-separated seeds");
  f.add(app, "--seed", "seed", "single seed");
  f.add(app, "--manifest", "manifest", "manifest CSV");
  f.add(app, "--cache-dir", "cache_dir", "feature cache root");
  f.add(app, "--out-dir", "out_dir", "checkpoint directory");
  f.add(app, "--report", "report", "JSON-lines report path");
  f.add(app, "--plan", "plan", "preset name or step list");
  f.add(app, "--arch", "arch", "cc | ssn | ssc | rcc");
  f.add(app, "--epochs", "epochs", "training epochs");
  f.add(app, "--batch-size", "batch_size", "training batch size");
  f.add(app, "--lr", "lr", "Adam learning rate");
  f.add(app, "--weight-decay", "weight_decay", "L2 weight decay");
  f.add(app, "--jobs", "jobs", "extraction workers");
}

void require_manifest(const RunConfig& c) {
  if (c.manifest.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no manifest given (--manifest or config file)");
  }
}

data::Split parse_split(const std::string& s) {
  for (auto split : {data::Split::kTrain, data::Split::kDevel, data::Split::kTest}) {
    if (data::split_name(split) == s) return split;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown split '" + s + "'");
}

int cmd_synth(std::size_t n, std::uint64_t seed, const fs::path& out_dir, std::ostream& out) {
  data::SynthOptions opts;
  opts.n_per_class = n;
  opts.seed = seed;
  data::synth_corpus(opts, out_dir);
  out << (out_dir / "manifest.csv").string() << "\n";
  return 0;
}

int cmd_extract(const RunConfig& c, std::ostream& out) {
  require_manifest(c);
  const auto manifest = data::load_manifest(c.manifest);
  data::CacheOptions opts;
  opts.jobs = c.jobs;
  if (auto speed = c.plan.speed_step()) opts.speed = *speed;
  for (auto seed : c.seeds) {
    auto ts = data::expand_training_set(manifest, seed);
    const auto index = data::build_cache(ts, manifest, c.cache_dir, opts);
    for (const auto& e : index.errors) out << "warning: skipped devel clip " << e << "\n";
    out << "seed " << seed << ": " << index.train.size() << " train images, "
        << index.devel.size() << " devel images, " << index.written << " written\n";
  }
  return 0;
}

int cmd_preview(const fs::path& clip, const std::string& plan_text, std::uint64_t seed,
                const fs::path& out_dir, std::ostream& out) {
  const auto plan = augment::AugmentationPlan::parse(plan_text);
  plan.validate();
  const auto wave = audio::read_wav(clip);
  const features::MelExtractor extractor;
  fs::create_directories(out_dir);
  const std::string stem = clip.stem().string();

  auto emit = [&](const std::string& name, const features::MelSpectrogram& m) {
    const fs::path p = out_dir / (stem + "_" + name + ".pgm");
    features::write_cached_image(p, features::quantize_u8(m));
    out << p.string() << " " << m.n_mels() << "x" << m.n_frames() << "\n";
  };
  const audio::RandomStream raw_rs(seed, {0, 0, audio::tag_of("preview")});
  emit("raw", augment::apply_plan(wave, augment::AugmentationPlan{}, raw_rs, extractor));
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    augment::AugmentationPlan single;
    single.steps.push_back(plan.steps[i]);
    const audio::RandomStream rs(seed, {i + 1, 0, audio::tag_of("preview")});
    emit(std::to_string(i + 1) + "_" + std::string(augment::step_kind_name(plan.steps[i].kind)),
         augment::apply_plan(wave, single, rs, extractor));
  }
  return 0;
}

int cmd_train(const RunConfig& c, std::ostream& out) {
  require_manifest(c);
  std::vector<pipeline::RunResult> runs;
  for (auto seed : c.seeds) {
    auto r = pipeline::train_run(c, seed, {}, &out);
    out << "seed " << seed << ": best devel uar " << format_double(r.best_uar)
        << " at epoch " << r.epoch_of_best << ", checkpoint " << r.checkpoint.string();
    if (r.skipped_batches > 0) out << " (" << r.skipped_batches << " undersized batches skipped)";
    out << "\n";
    runs.push_back(std::move(r));
  }
  pipeline::append_report(c.report, c, runs);
  const auto s = pipeline::summarize(runs);
  out << s.arch << " " << s.plan_label << ": " << s.formatted << " (" << s.n_seeds
      << " seeds), report " << c.report.string() << "\n";
  return 0;
}

int cmd_eval(const RunConfig& c, const fs::path& checkpoint, const std::string& split_text,
             std::ostream& out) {
  require_manifest(c);
  const auto split = parse_split(split_text);
  auto loaded = nn::load_checkpoint(checkpoint);
  const auto manifest = data::load_manifest(c.manifest);
  const auto set = pipeline::extract_split(manifest, split);
  if (set.spectrograms.empty()) {
    throw Error(ErrorCode::kEmpty, "split '" + split_text + "' has no clips");
  }
  std::vector<double> probs;
  for (std::size_t start = 0; start < set.spectrograms.size(); start += pipeline::kEvalChunk) {
    const std::size_t end = std::min(set.spectrograms.size(), start + pipeline::kEvalChunk);
    std::vector<const features::MelSpectrogram*> chunk;
    for (std::size_t i = start; i < end; ++i) chunk.push_back(&set.spectrograms[i]);
    const auto p = loaded.model->predict(pipeline::stack_batch(chunk));
    probs.insert(probs.end(), p.begin(), p.end());
  }
  const auto cm = metrics::confusion(probs, set.labels);
  out << "split " << split_text << " clips " << cm.total() << " tp " << cm.tp << " fn " << cm.fn
      << " tn " << cm.tn << " fp " << cm.fp << "\n";
  if (auto it = loaded.metadata.find("devel_uar"); it != loaded.metadata.end()) {
    out << "checkpoint devel_uar " << it->second << "\n";
  }
  out << "uar " << format_double(metrics::uar(cm)) << "\n";
  return 0;
}

int cmd_params(const std::string& arch_text, std::ostream& out) {
  std::vector<nn::Architecture> archs;
  if (arch_text == "all") {
    archs = nn::all_architectures();
  } else {
    archs.push_back(nn::parse_architecture(arch_text));
  }
  for (auto arch : archs) {
    auto model = nn::build_model(arch);
    const auto table = model->parameter_table();
    out << "architecture " << nn::architecture_name(arch) << "\n";
    std::size_t sum = 0;
    char line[256];
    for (const auto& row : table) {
      std::snprintf(line, sizeof(line), "  %-28s %-10s %-22s %10zu\n", row.name.c_str(),
                    row.kind.c_str(), row.shapes.c_str(), row.count);
      out << line;
      sum += row.count;
    }
    const std::size_t ref = nn::reference_parameter_count(arch);
    const long long dev = static_cast<long long>(sum) - static_cast<long long>(ref);
    std::snprintf(line, sizeof(line),
                  "total %zu\nreference %zu\ndeviation %+lld (%+.2f%%)\n", sum, ref, dev,
                  100.0 * static_cast<double>(dev) / static_cast<double>(ref));
    out << line;
  }
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"melforge: mel-spectrogram augmentation and CNN training"};
  app.require_subcommand(1);

  auto* synth = app.add_subcommand("synth", "write a synthetic two-class corpus");
  std::size_t synth_n = 100;
  std::uint64_t synth_seed = 0;
  std::string synth_out;
  synth->add_option("--n", synth_n, "clips per class");
  synth->add_option("--seed", synth_seed, "corpus seed");
  synth->add_option("--out", synth_out, "output directory")->required();

  ConfigFlags extract_flags, train_flags, eval_flags;
  auto* extract = app.add_subcommand("extract", "build the feature cache");
  add_run_flags(extract, extract_flags);

  auto* preview = app.add_subcommand("preview", "write raw and per-augmentation spectrogram images");
  std::string preview_clip, preview_plan = "none", preview_out;
  std::uint64_t preview_seed = 0;
  preview->add_option("--clip", preview_clip, "input WAV")->required();
  preview->add_option("--plan", preview_plan, "preset name or step list");
  preview->add_option("--seed", preview_seed, "augmentation seed");
  preview->add_option("--out", preview_out, "output directory")->required();

  auto* train = app.add_subcommand("train", "train one model per seed and append to the report");
  add_run_flags(train, train_flags);

  auto* eval = app.add_subcommand("eval", "score a checkpoint on a split");
  add_run_flags(eval, eval_flags);
  std::string eval_ckpt, eval_split = "devel";
  eval->add_option("--checkpoint", eval_ckpt, "checkpoint file")->required();
  eval->add_option("--split", eval_split, "train | devel | test");

  auto* params = app.add_subcommand("params", "print per-layer parameter counts");
  std::string params_arch = "all";
  params->add_option("--arch", params_arch, "cc | ssn | ssc | rcc | all");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (synth->parsed()) return cmd_synth(synth_n, synth_seed, synth_out, out);
    if (extract->parsed()) return cmd_extract(extract_flags.resolve(), out);
    if (preview->parsed()) {
      return cmd_preview(preview_clip, preview_plan, preview_seed, preview_out, out);
    }
    if (train->parsed()) return cmd_train(train_flags.resolve(), out);
    if (eval->parsed()) return cmd_eval(eval_flags.resolve(), eval_ckpt, eval_split, out);
    if (params->parsed()) return cmd_params(params_arch, out);
  } catch (const std::exception& e) {
    err << "melforge: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace melforge::cli
