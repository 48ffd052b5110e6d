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

#ifndef MELFORGE_DATA_CACHE_H_
#define MELFORGE_DATA_CACHE_H_

#include <filesystem>
#include <string>
#include <vector>

#include "melforge/augment/plan.h"
#include "melforge/data/manifest.h"
#include "melforge/data/training_set.h"
#include "melforge/features/image.h"
#include "melforge/features/mel.h"

namespace melforge::data {

// Cache layout under a cache root:
//
//   seed-<seed>/index.tsv              train items
//   seed-<seed>/<clip_id>_v<k>.pgm     + .txt range sidecar
//   devel/index.tsv                    devel clips (never augmented)
//   devel/<clip_id>.pgm                + .txt range sidecar
//
// Index lines are "clip_id<TAB>variant<TAB>relative_path", relative to the
// directory holding the index. Existing images are reused when the stamp
// file of their directory matches the current extraction settings.
struct CacheEntry {
  std::string clip_id;
  int variant = 0;
  std::filesystem::path relative_path;
};

struct CacheIndex {
  std::filesystem::path train_dir;
  std::filesystem::path devel_dir;
  std::vector<CacheEntry> train;  // same order as TrainingSet::items
  std::vector<CacheEntry> devel;  // manifest order
  std::vector<std::size_t> devel_entries;  // Manifest::entries index per devel row
  std::vector<std::string> errors;  // devel clips that failed and were skipped
  std::size_t written = 0;          // images produced by this call
};

struct CacheOptions {
  features::FeatureConfig features;
  // Bounds of the speed perturbation applied to variants 1-3.
  augment::AugmentStep speed{augment::StepKind::kSpeed, 0.3,
                             augment::Fill::kZero, 0.7, 1.7};
  unsigned jobs = 1;
};

// Log-mel of one cache item, before quantization: the clip, speed-perturbed
// (and fitted back to its length) for variants > 0.
features::MelSpectrogram cache_item_log_mel(const audio::Waveform& clip,
                                            const TrainingItem& item,
                                            std::uint64_t seed,
                                            const CacheOptions& options,
                                            const features::MelExtractor& extractor);

// Extracts every training item and devel clip, writes the images and index
// files, and fills TrainingItem::cached_image. Work is split across
// options.jobs threads; output does not depend on the thread count. Throws
// kIoError listing every failed train item if any train item fails.
CacheIndex build_cache(TrainingSet& ts, const Manifest& m,
                       const std::filesystem::path& cache_root,
                       const CacheOptions& options = {});

std::vector<CacheEntry> read_cache_index(const std::filesystem::path& index_path);
void write_cache_index(const std::filesystem::path& index_path,
                       const std::vector<CacheEntry>& entries);

}  // namespace melforge::data

#endif  // MELFORGE_DATA_CACHE_H_
