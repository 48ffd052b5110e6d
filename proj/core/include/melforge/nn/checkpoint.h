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

#ifndef MELFORGE_NN_CHECKPOINT_H_
#define MELFORGE_NN_CHECKPOINT_H_

#include <filesystem>
#include <map>
#include <memory>
#include <string>

#include "melforge/nn/model.h"

namespace melforge::nn {

// Checkpoint binary layout, all integers little-endian:
//
//   magic        8 bytes  "MFCKPT01"
//   arch         str      "cc" | "ssn" | "ssc" | "rcc"
//   input_height u64, input_width u64, bands u64
//   dropout      f64, leaky_slope f64
//   conv_filters u32 count, u64 each
//   linear_units u32 count, u64 each
//   metadata     u32 count, (str key, str value) each
//   tensors      u32 count, then per tensor:
//                  str name, u32 rank, u64 dims[rank], f64 data[numel]
//
// where str is a u32 byte length followed by the bytes. Tensors are the
// model's parameters followed by its buffers (batchnorm running stats), in
// model order. A text manifest "<path>.manifest" lists the architecture,
// metadata and one "name<TAB>shape<TAB>param|buffer" line per tensor.
using Metadata = std::map<std::string, std::string>;

struct LoadedCheckpoint {
  std::unique_ptr<Model> model;
  Metadata metadata;
};

// Writes to a temporary file and renames, so a crash never leaves a
// truncated checkpoint at path.
void save_checkpoint(const std::filesystem::path& path, Model& model,
                     const Metadata& metadata = {});
LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace melforge::nn

#endif  // MELFORGE_NN_CHECKPOINT_H_
