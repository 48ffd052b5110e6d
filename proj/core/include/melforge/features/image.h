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

#ifndef MELFORGE_FEATURES_IMAGE_H_
#define MELFORGE_FEATURES_IMAGE_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "melforge/features/mel.h"

namespace melforge::features {

// 8-bit cache image of a spectrogram plus the value range needed to undo the
// quantization. Row r is mel band r (low energy -> 0 -> dark).
struct GrayImage {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> pixels;
  double min_value = 0.0;
  double max_value = 0.0;

  std::uint8_t at(std::size_t r, std::size_t c) const {
    return pixels[r * cols + c];
  }
  friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

// pixel = round(255 * (v - min) / (max - min)); constant input gives zeros.
// kNonFinite on NaN/Inf.
GrayImage quantize_u8(const MelSpectrogram& m);
// v = min + pixel * (max - min) / 255, tagged as log scale.
MelSpectrogram dequantize(const GrayImage& g);

// Binary PGM (P5, maxval 255). The file stores the highest mel band in the
// first row so previews render low frequencies at the bottom.
std::vector<std::uint8_t> encode_pgm(const GrayImage& g);
// Restores pixels and shape; min_value/max_value are left at 0.
GrayImage decode_pgm(std::span<const std::uint8_t> bytes);

// Sidecar record "min=<v> max=<v>" with round-trip precision.
std::string format_range_record(double min_value, double max_value);
void parse_range_record(const std::string& text, double& min_value,
                        double& max_value);

// Path of the range sidecar for an image path (same stem, .txt extension).
std::filesystem::path sidecar_path(const std::filesystem::path& image_path);

// Writes the PGM and its sidecar; read_cached_image reads both back.
void write_cached_image(const std::filesystem::path& image_path,
                        const GrayImage& g);
GrayImage read_cached_image(const std::filesystem::path& image_path);

}  // namespace melforge::features

#endif  // MELFORGE_FEATURES_IMAGE_H_
