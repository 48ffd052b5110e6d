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

#include "melforge/data/training_set.h"

#include <numeric>

#include "melforge/error.h"

namespace melforge::data {

audio::StreamId speed_variant_stream(std::size_t entry_index, int variant) {
  return {entry_index, 0,
          audio::tag_of("speed-variant") + static_cast<std::uint64_t>(variant)};
}

TrainingSet expand_training_set(const Manifest& m, std::uint64_t seed) {
  TrainingSet ts;
  ts.seed = seed;
  for (std::size_t i : m.indices(Split::kTrain)) {
    const auto& e = m.entries[i];
    for (int v = 0; v < kVariantsPerClip; ++v) {
      ts.items.push_back({e.clip_id, i, v, e.label, speed_variant_stream(i, v), {}});
    }
  }
  if (ts.items.empty()) {
    throw Error(ErrorCode::kEmptyTrainSplit, "manifest has no train entries");
  }
  return ts;
}

std::vector<std::vector<std::size_t>> batches(std::size_t n_items,
                                              std::uint64_t epoch,
                                              std::uint64_t seed,
                                              std::size_t batch_size) {
  if (batch_size == 0) {
    throw Error(ErrorCode::kInvalidArgument, "batches: batch_size must be >= 1");
  }
  std::vector<std::size_t> order(n_items);
  std::iota(order.begin(), order.end(), std::size_t{0});
  audio::RandomStream rs(seed, {0, epoch, audio::tag_of("batches")});
  audio::shuffle(order, rs);

  std::vector<std::vector<std::size_t>> out;
  for (std::size_t start = 0; start < n_items; start += batch_size) {
    const std::size_t end = std::min(n_items, start + batch_size);
    out.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                     order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return out;
}

std::vector<std::vector<std::size_t>> batches(const TrainingSet& ts,
                                              std::uint64_t epoch,
                                              std::uint64_t seed,
                                              std::size_t batch_size) {
  return batches(ts.items.size(), epoch, seed, batch_size);
}

}  // namespace melforge::data
