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

#ifndef MELFORGE_DATA_MANIFEST_H_
#define MELFORGE_DATA_MANIFEST_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace melforge::data {

enum class Label { kClear = 0, kMask = 1 };
enum class Split { kTrain, kDevel, kTest };

std::string_view label_name(Label label);
std::string_view split_name(Split split);
inline int label_value(Label label) { return static_cast<int>(label); }

struct ManifestEntry {
  std::string clip_id;  // file stem, unique within a manifest
  std::filesystem::path path;
  Label label = Label::kClear;
  Split split = Split::kTrain;
};

struct Manifest {
  std::vector<ManifestEntry> entries;

  std::size_t count(Split split) const;
  std::vector<std::size_t> indices(Split split) const;
};

// CSV "file_name,label[,split]" with a header row. Relative file names are
// resolved against base_dir. Without a split column every row is train.
// Errors: kParseError with the 1-based line number, kDuplicateClipId,
// kUnknownLabel.
Manifest parse_manifest(std::string_view csv, const std::filesystem::path& base_dir);

// parse_manifest on a file, with paths resolved against its directory and
// each one checked to exist (kNotFound).
Manifest load_manifest(const std::filesystem::path& path);

// Writes the CSV with a split column; paths are written relative to the
// manifest's directory when possible.
void write_manifest(const std::filesystem::path& path, const Manifest& m);

}  // namespace melforge::data

#endif  // MELFORGE_DATA_MANIFEST_H_
