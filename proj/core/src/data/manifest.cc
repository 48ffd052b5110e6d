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

#include "melforge/data/manifest.h"

#include <fstream>
#include <set>
#include <sstream>

#include "melforge/error.h"

namespace melforge::data {
namespace {

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      out.push_back(trim(std::string_view(line).substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

[[noreturn]] void parse_error(std::size_t line_no, const std::string& what) {
  throw Error(ErrorCode::kParseError, "manifest line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

std::string_view label_name(Label label) {
  return label == Label::kMask ? "mask" : "clear";
}

std::string_view split_name(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kDevel: return "devel";
    case Split::kTest: return "test";
  }
  return "?";
}

std::size_t Manifest::count(Split split) const {
  std::size_t n = 0;
  for (const auto& e : entries) n += e.split == split;
  return n;
}

std::vector<std::size_t> Manifest::indices(Split split) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].split == split) out.push_back(i);
  }
  return out;
}

Manifest parse_manifest(std::string_view csv, const std::filesystem::path& base_dir) {
  std::istringstream in{std::string(csv)};
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  bool has_split = false;
  Manifest m;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto cols = split_csv(line);
    if (!have_header) {
      if (cols.size() < 2 || cols.size() > 3 || cols[0] != "file_name" ||
          cols[1] != "label" || (cols.size() == 3 && cols[2] != "split")) {
        parse_error(line_no, "expected header file_name,label[,split]");
      }
      has_split = cols.size() == 3;
      have_header = true;
      continue;
    }
    if (cols.size() != (has_split ? 3u : 2u)) {
      parse_error(line_no, "expected " + std::to_string(has_split ? 3 : 2) +
                               " fields, got " + std::to_string(cols.size()));
    }
    if (cols[0].empty()) parse_error(line_no, "empty file_name");

    ManifestEntry e;
    const std::filesystem::path file(cols[0]);
    e.path = file.is_absolute() ? file : base_dir / file;
    e.clip_id = file.stem().string();
    if (cols[1] == "clear") {
      e.label = Label::kClear;
    } else if (cols[1] == "mask") {
      e.label = Label::kMask;
    } else {
      throw Error(ErrorCode::kUnknownLabel, "manifest line " + std::to_string(line_no) +
                                                ": label '" + cols[1] + "'");
    }
    if (has_split) {
      if (cols[2] == "train") {
        e.split = Split::kTrain;
      } else if (cols[2] == "devel") {
        e.split = Split::kDevel;
      } else if (cols[2] == "test") {
        e.split = Split::kTest;
      } else {
        parse_error(line_no, "unknown split '" + cols[2] + "'");
      }
    }
    if (!seen.insert(e.clip_id).second) {
      throw Error(ErrorCode::kDuplicateClipId, "manifest line " + std::to_string(line_no) +
                                                   ": clip id '" + e.clip_id + "'");
    }
    m.entries.push_back(std::move(e));
  }
  if (!have_header) parse_error(line_no, "missing header");
  return m;
}

Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot open manifest " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  Manifest m;
  try {
    m = parse_manifest(ss.str(), path.parent_path());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.message());
  }
  for (const auto& e : m.entries) {
    if (!std::filesystem::exists(e.path)) {
      throw Error(ErrorCode::kNotFound,
                  path.string() + ": clip '" + e.clip_id + "' missing at " + e.path.string());
    }
  }
  return m;
}

void write_manifest(const std::filesystem::path& path, const Manifest& m) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << "file_name,label,split\n";
  const auto base = path.parent_path();
  for (const auto& e : m.entries) {
    auto rel = e.path.lexically_relative(base);
    if (rel.empty() || *rel.begin() == "..") rel = e.path;
    out << rel.generic_string() << "," << label_name(e.label) << ","
        << split_name(e.split) << "\n";
  }
  if (!out) throw Error(ErrorCode::kIoError, "short write to " + path.string());
}

}  // namespace melforge::data
