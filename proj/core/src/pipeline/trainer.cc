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

#include "melforge/pipeline/trainer.h"

#include <cstdio>
#include <ostream>

#include "melforge/audio/wav.h"
#include "melforge/augment/augment.h"
#include "melforge/error.h"
#include "melforge/features/image.h"
#include "melforge/format.h"
#include "melforge/metrics/metrics.h"
#include "melforge/nn/checkpoint.h"
#include "melforge/nn/loss.h"
#include "melforge/nn/optim.h"

namespace melforge::pipeline {
namespace fs = std::filesystem;

nn::Tensor stack_batch(const std::vector<const features::MelSpectrogram*>& items) {
  if (items.empty()) throw Error(ErrorCode::kEmpty, "stack_batch: no items");
  const std::size_t h = items[0]->n_mels(), w = items[0]->n_frames();
  nn::Tensor batch({items.size(), 1, h, w});
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& m = *items[i];
    if (m.n_mels() != h || m.n_frames() != w) {
      throw Error(ErrorCode::kShapeMismatch,
                  "stack_batch: spectrogram " + std::to_string(i) + " is " +
                      std::to_string(m.n_mels()) + "x" + std::to_string(m.n_frames()) +
                      ", expected " + std::to_string(h) + "x" + std::to_string(w));
    }
    std::copy(m.values.data.begin(), m.values.data.end(), batch.ptr() + i * h * w);
  }
  return batch;
}

LabeledSpectrograms load_devel(const data::CacheIndex& index, const data::Manifest& m) {
  LabeledSpectrograms out;
  for (std::size_t i = 0; i < index.devel.size(); ++i) {
    const auto g = features::read_cached_image(index.devel_dir / index.devel[i].relative_path);
    out.spectrograms.push_back(features::normalize_local(features::dequantize(g)));
    out.labels.push_back(data::label_value(m.entries[index.devel_entries[i]].label));
  }
  return out;
}

LabeledSpectrograms extract_split(const data::Manifest& m, data::Split split,
                                  const features::FeatureConfig& config) {
  const features::MelExtractor extractor(config);
  LabeledSpectrograms out;
  for (std::size_t i : m.indices(split)) {
    const auto log_mel = extractor.log_mel(audio::read_wav(m.entries[i].path));
    out.spectrograms.push_back(
        features::normalize_local(features::dequantize(features::quantize_u8(log_mel))));
    out.labels.push_back(data::label_value(m.entries[i].label));
  }
  return out;
}

double evaluate_uar(nn::Model& model, const LabeledSpectrograms& set) {
  std::vector<double> probs;
  for (std::size_t start = 0; start < set.spectrograms.size(); start += kEvalChunk) {
    const std::size_t end = std::min(set.spectrograms.size(), start + kEvalChunk);
    std::vector<const features::MelSpectrogram*> chunk;
    for (std::size_t i = start; i < end; ++i) chunk.push_back(&set.spectrograms[i]);
    const auto p = model.predict(stack_batch(chunk));
    probs.insert(probs.end(), p.begin(), p.end());
  }
  return metrics::uar(metrics::confusion(probs, set.labels));
}

std::string checkpoint_name(const RunConfig& config, std::uint64_t seed) {
  return std::string(nn::architecture_name(config.arch)) + "-" + plan_label(config.plan) +
         "-seed" + std::to_string(seed) + ".ckpt";
}

RunResult train_run(const RunConfig& config, std::uint64_t seed,
                    const TrainerHooks& hooks, std::ostream* log) {
  config.plan.validate();
  const auto manifest = data::load_manifest(config.manifest);
  auto ts = data::expand_training_set(manifest, seed);

  data::CacheOptions cache_opts;
  cache_opts.jobs = config.jobs;
  if (auto speed = config.plan.speed_step()) cache_opts.speed = *speed;
  const auto index = data::build_cache(ts, manifest, config.cache_dir, cache_opts);
  for (const auto& err : index.errors) {
    if (log) *log << "warning: skipped devel clip " << err << "\n";
  }

  // Cached log-mels stay in memory; augmentation runs on copies.
  std::vector<features::MelSpectrogram> train_log_mel;
  std::vector<double> train_labels;
  train_log_mel.reserve(ts.items.size());
  for (const auto& item : ts.items) {
    train_log_mel.push_back(features::dequantize(features::read_cached_image(item.cached_image)));
    train_labels.push_back(data::label_value(item.label));
  }
  const auto devel = load_devel(index, manifest);
  if (devel.spectrograms.empty()) {
    throw Error(ErrorCode::kEmpty, "training needs at least one devel clip");
  }

  nn::ArchitectureConfig arch_cfg;
  arch_cfg.input_height = train_log_mel.front().n_mels();
  arch_cfg.input_width = train_log_mel.front().n_frames();
  auto model = nn::build_model(config.arch, arch_cfg, seed);
  nn::Adam adam(model->parameters(),
                nn::AdamConfig{config.lr, 0.9, 0.999, 1e-8, config.weight_decay});

  RunResult result;
  result.seed = seed;
  result.arch = config.arch;
  result.plan = config.plan.to_string();
  result.plan_label = plan_label(config.plan);
  result.param_count = model->parameter_count();
  fs::create_directories(config.out_dir);
  const fs::path ckpt_path = config.out_dir / checkpoint_name(config, seed);

  std::uint64_t step = 0;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    double loss_sum = 0.0;
    std::size_t seen = 0;
    for (const auto& batch : data::batches(ts, epoch, seed, config.batch_size)) {
      if (batch.size() < 2) {
        ++result.skipped_batches;
        continue;
      }
      std::vector<features::MelSpectrogram> inputs;
      std::vector<double> labels;
      inputs.reserve(batch.size());
      for (std::size_t idx : batch) {
        const audio::RandomStream rs(seed, {idx, epoch, audio::tag_of("augment")});
        inputs.push_back(features::normalize_local(
            augment::augment_log_mel(train_log_mel[idx], config.plan, rs)));
        if (hooks.on_model_input) hooks.on_model_input(inputs.back());
        labels.push_back(train_labels[idx]);
      }
      std::vector<const features::MelSpectrogram*> ptrs;
      for (const auto& x : inputs) ptrs.push_back(&x);

      const nn::ForwardContext ctx{nn::Mode::kTrain, seed, step++, epoch};
      adam.zero_grad();
      const auto outputs = model->forward(stack_batch(ptrs), ctx);
      const auto loss = nn::model_loss(outputs, labels);
      model->backward(loss.grads);
      adam.step();
      loss_sum += loss.value * static_cast<double>(batch.size());
      seen += batch.size();
    }

    for (const auto& x : devel.spectrograms) {
      if (hooks.on_model_input) hooks.on_model_input(x);
    }
    EpochLog entry{epoch, seen ? loss_sum / static_cast<double>(seen) : 0.0,
                   evaluate_uar(*model, devel)};
    result.epochs.push_back(entry);
    if (entry.devel_uar > result.best_uar) {
      result.best_uar = entry.devel_uar;
      result.epoch_of_best = epoch;
      nn::save_checkpoint(ckpt_path, *model,
                          {{"seed", std::to_string(seed)},
                           {"epoch", std::to_string(epoch)},
                           {"devel_uar", format_double(entry.devel_uar)},
                           {"plan", result.plan}});
      result.checkpoint = ckpt_path;
    }
    if (log) {
      char line[160];
      std::snprintf(line, sizeof(line), "seed %llu epoch %zu/%zu loss %.6f devel_uar %.4f%s\n",
                    static_cast<unsigned long long>(seed), epoch, config.epochs,
                    entry.train_loss, entry.devel_uar,
                    result.epoch_of_best == epoch ? " *" : "");
      *log << line << std::flush;
    }
    if (hooks.on_epoch) hooks.on_epoch(entry);
  }
  return result;
}

}  // namespace melforge::pipeline
