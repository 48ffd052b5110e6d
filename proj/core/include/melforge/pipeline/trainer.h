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

#ifndef MELFORGE_PIPELINE_TRAINER_H_
#define MELFORGE_PIPELINE_TRAINER_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "melforge/data/cache.h"
#include "melforge/data/manifest.h"
#include "melforge/features/mel.h"
#include "melforge/nn/model.h"
#include "melforge/pipeline/config.h"

namespace melforge::pipeline {

// Evaluation runs in fixed chunks so scores never depend on the training
// batch size.
inline constexpr std::size_t kEvalChunk = 100;

struct LabeledSpectrograms {
  std::vector<features::MelSpectrogram> spectrograms;
  std::vector<int> labels;
};

// Stacks normalized spectrograms into [N, 1, n_mels, n_frames].
nn::Tensor stack_batch(const std::vector<const features::MelSpectrogram*>& items);

// Devel features from the cache (dequantized and normalized, never augmented).
LabeledSpectrograms load_devel(const data::CacheIndex& index, const data::Manifest& m);

// Features for any split, through the same quantize/dequantize path as the
// cache but without touching disk.
LabeledSpectrograms extract_split(const data::Manifest& m, data::Split split,
                                  const features::FeatureConfig& features = {});

// Eval-mode predictions over the set in kEvalChunk chunks, then UAR.
double evaluate_uar(nn::Model& model, const LabeledSpectrograms& set);

struct EpochLog {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double devel_uar = 0.0;
};

struct RunResult {
  std::uint64_t seed = 0;
  nn::Architecture arch = nn::Architecture::kCC;
  std::string plan;
  std::string plan_label;
  double best_uar = -1.0;
  std::size_t epoch_of_best = 0;
  std::size_t param_count = 0;
  std::vector<EpochLog> epochs;
  std::filesystem::path checkpoint;
  std::size_t skipped_batches = 0;
};

struct TrainerHooks {
  // Sees every normalized spectrogram right before it enters the model.
  std::function<void(const features::MelSpectrogram&)> on_model_input;
  std::function<void(const EpochLog&)> on_epoch;
};

// Checkpoint file name for a run: "<arch>-<plan label>-seed<k>.ckpt".
std::string checkpoint_name(const RunConfig& config, std::uint64_t seed);

// One seed of the training loop. Builds the cache if needed, trains for
// config.epochs epochs with real-time spectrogram augmentation, evaluates on
// devel after every epoch, and writes the best-devel checkpoint to
// config.out_dir whenever a completed epoch improves on it. Batches smaller
// than 2 are skipped (batchnorm needs two samples). log may be null.
RunResult train_run(const RunConfig& config, std::uint64_t seed,
                    const TrainerHooks& hooks = {}, std::ostream* log = nullptr);

}  // namespace melforge::pipeline

#endif  // MELFORGE_PIPELINE_TRAINER_H_
