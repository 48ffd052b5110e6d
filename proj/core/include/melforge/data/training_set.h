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

#ifndef MELFORGE_DATA_TRAINING_SET_H_
#define MELFORGE_DATA_TRAINING_SET_H_

#include <cstdint>
#include <filesystem>
#include <vector>

#include "melforge/audio/random.h"
#include "melforge/data/manifest.h"

namespace melforge::data {

// Every train clip contributes its raw version (variant 0) and three
// independently speed-perturbed copies.
inline constexpr int kVariantsPerClip = 4;

struct TrainingItem {
  std::string clip_id;
  std::size_t entry_index = 0;  // into Manifest::entries
  int variant = 0;
  Label label = Label::kClear;
  audio::StreamId speed_stream;  // unused for variant 0
  std::filesystem::path cached_image;  // empty until the cache is built
};

struct TrainingSet {
  std::uint64_t seed = 0;
  std::vector<TrainingItem> items;
};

// Stream id of the speed draw for one variant: (entry index, 0,
// tag_of("speed-variant") + variant).
audio::StreamId speed_variant_stream(std::size_t entry_index, int variant);

// Throws kEmptyTrainSplit when the manifest has no train entries.
TrainingSet expand_training_set(const Manifest& m, std::uint64_t seed);

// A seeded permutation of [0, n_items) chunked into ceil(n / batch_size)
// batches; depends only on (seed, epoch).
std::vector<std::vector<std::size_t>> batches(std::size_t n_items,
                                              std::uint64_t epoch,
                                              std::uint64_t seed,
                                              std::size_t batch_size = 200);
std::vector<std::vector<std::size_t>> batches(const TrainingSet& ts,
                                              std::uint64_t epoch,
                                              std::uint64_t seed,
                                              std::size_t batch_size = 200);

}  // namespace melforge::data

#endif  // MELFORGE_DATA_TRAINING_SET_H_
