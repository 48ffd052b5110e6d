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

#include "melforge/features/image.h"

#include <algorithm>
#include <charconv>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include "melforge/error.h"

namespace melforge::features {
namespace {

std::vector<std::uint8_t> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void dump(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIoError, "short write to " + path.string());
}

// Reads the next whitespace-delimited header token, skipping # comments.
std::string next_token(std::span<const std::uint8_t> b, std::size_t& pos) {
  while (pos < b.size()) {
    if (b[pos] == '#') {
      while (pos < b.size() && b[pos] != '\n') ++pos;
    } else if (std::isspace(b[pos])) {
      ++pos;
    } else {
      break;
    }
  }
  std::string tok;
  while (pos < b.size() && !std::isspace(b[pos]) && b[pos] != '#') {
    tok.push_back(static_cast<char>(b[pos++]));
  }
  return tok;
}

std::size_t parse_size(const std::string& tok, const char* field) {
  std::size_t v = 0;
  const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size() || v == 0) {
    throw Error(ErrorCode::kUnsupportedFormat,
                std::string("pgm ") + field + ": '" + tok + "'");
  }
  return v;
}

}  // namespace

GrayImage quantize_u8(const MelSpectrogram& m) {
  const auto& d = m.values.data;
  if (!std::all_of(d.begin(), d.end(), [](double v) { return std::isfinite(v); })) {
    throw Error(ErrorCode::kNonFinite, "quantize_u8: input has NaN or Inf");
  }
  GrayImage g;
  g.rows = m.values.rows;
  g.cols = m.values.cols;
  g.pixels.assign(d.size(), 0);
  if (d.empty()) return g;
  const auto [lo, hi] = std::minmax_element(d.begin(), d.end());
  g.min_value = *lo;
  g.max_value = *hi;
  const double range = g.max_value - g.min_value;
  if (range > 0.0) {
    for (std::size_t i = 0; i < d.size(); ++i) {
      const double p = std::nearbyint(255.0 * (d[i] - g.min_value) / range);
      g.pixels[i] = static_cast<std::uint8_t>(std::clamp(p, 0.0, 255.0));
    }
  }
  return g;
}

MelSpectrogram dequantize(const GrayImage& g) {
  MelSpectrogram m{Matrix(g.rows, g.cols), Scale::kLog};
  const double range = g.max_value - g.min_value;
  for (std::size_t i = 0; i < g.pixels.size(); ++i) {
    m.values.data[i] = g.min_value + range * (g.pixels[i] / 255.0);
  }
  return m;
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& g) {
  const std::string header = "P5\n" + std::to_string(g.cols) + " " +
                             std::to_string(g.rows) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(header.size() + g.pixels.size());
  for (std::size_t r = g.rows; r-- > 0;) {
    const auto row = g.pixels.begin() + static_cast<std::ptrdiff_t>(r * g.cols);
    out.insert(out.end(), row, row + static_cast<std::ptrdiff_t>(g.cols));
  }
  return out;
}

GrayImage decode_pgm(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 0;
  if (next_token(bytes, pos) != "P5") {
    throw Error(ErrorCode::kUnsupportedFormat, "pgm magic: expected P5");
  }
  GrayImage g;
  g.cols = parse_size(next_token(bytes, pos), "width");
  g.rows = parse_size(next_token(bytes, pos), "height");
  if (parse_size(next_token(bytes, pos), "maxval") != 255) {
    throw Error(ErrorCode::kUnsupportedFormat, "pgm maxval: expected 255");
  }
  ++pos;  // single whitespace byte after maxval
  if (bytes.size() < pos + g.rows * g.cols) {
    throw Error(ErrorCode::kUnsupportedFormat, "pgm raster: truncated");
  }
  g.pixels.resize(g.rows * g.cols);
  for (std::size_t r = 0; r < g.rows; ++r) {
    const auto src = bytes.begin() +
                     static_cast<std::ptrdiff_t>(pos + (g.rows - 1 - r) * g.cols);
    std::copy(src, src + static_cast<std::ptrdiff_t>(g.cols),
              g.pixels.begin() + static_cast<std::ptrdiff_t>(r * g.cols));
  }
  return g;
}

std::string format_range_record(double min_value, double max_value) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "min=%.17g max=%.17g\n", min_value, max_value);
  return buf;
}

void parse_range_record(const std::string& text, double& min_value,
                        double& max_value) {
  if (std::sscanf(text.c_str(), " min=%lf max=%lf", &min_value, &max_value) != 2 ||
      !(max_value >= min_value)) {
    throw Error(ErrorCode::kParseError, "range record: '" + text + "'");
  }
}

std::filesystem::path sidecar_path(const std::filesystem::path& image_path) {
  auto p = image_path;
  p.replace_extension(".txt");
  return p;
}

void write_cached_image(const std::filesystem::path& image_path,
                        const GrayImage& g) {
  dump(image_path, encode_pgm(g));
  const auto rec = format_range_record(g.min_value, g.max_value);
  dump(sidecar_path(image_path),
       std::span(reinterpret_cast<const std::uint8_t*>(rec.data()), rec.size()));
}

GrayImage read_cached_image(const std::filesystem::path& image_path) {
  GrayImage g;
  try {
    g = decode_pgm(slurp(image_path));
  } catch (const Error& e) {
    throw Error(e.code(), image_path.string() + ": " + e.message());
  }
  const auto side = slurp(sidecar_path(image_path));
  try {
    parse_range_record(std::string(side.begin(), side.end()), g.min_value,
                       g.max_value);
  } catch (const Error& e) {
    throw Error(e.code(), sidecar_path(image_path).string() + ": " + e.message());
  }
  return g;
}

}  // namespace melforge::features
