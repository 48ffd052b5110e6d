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

#include "melforge/pipeline/config.h"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "melforge/error.h"
#include "melforge/format.h"

namespace melforge::pipeline {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw Error(ErrorCode::kParseError,
              "config " + std::string(key) + ": bad value '" + std::string(value) + "'");
}

std::uint64_t parse_uint(std::string_view key, std::string_view v) {
  v = trim(v);
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) bad_value(key, v);
  return out;
}

double parse_real(std::string_view key, std::string_view v) {
  v = trim(v);
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(out)) bad_value(key, v);
  return out;
}

}  // namespace

void set_config_value(RunConfig& c, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "seeds" || key == "seed") {
    c.seeds.clear();
    std::size_t start = 0;
    for (std::size_t i = 0; i <= value.size(); ++i) {
      if (i == value.size() || value[i] == ',') {
        c.seeds.push_back(parse_uint(key, value.substr(start, i - start)));
        start = i + 1;
      }
    }
  } else if (key == "manifest") {
    c.manifest = std::string(value);
  } else if (key == "cache_dir") {
    c.cache_dir = std::string(value);
  } else if (key == "out_dir") {
    c.out_dir = std::string(value);
  } else if (key == "report") {
    c.report = std::string(value);
  } else if (key == "plan") {
    c.plan = augment::AugmentationPlan::parse(value);
  } else if (key == "arch") {
    c.arch = nn::parse_architecture(value);
  } else if (key == "epochs") {
    c.epochs = parse_uint(key, value);
  } else if (key == "batch_size") {
    c.batch_size = parse_uint(key, value);
    if (c.batch_size == 0) bad_value(key, value);
  } else if (key == "jobs") {
    c.jobs = static_cast<unsigned>(parse_uint(key, value));
  } else if (key == "lr") {
    c.lr = parse_real(key, value);
  } else if (key == "weight_decay") {
    c.weight_decay = parse_real(key, value);
  } else {
    throw Error(ErrorCode::kParseError, "config: unknown key '" + std::string(key) + "'");
  }
}

RunConfig parse_config(std::string_view text, RunConfig base) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const auto body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kParseError,
                  "config line " + std::to_string(line_no) + ": expected key = value");
    }
    try {
      set_config_value(base, body.substr(0, eq), body.substr(eq + 1));
    } catch (const Error& e) {
      throw Error(e.code(), "config line " + std::to_string(line_no) + ": " + e.message());
    }
  }
  return base;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream out;
  out << "seeds = ";
  for (std::size_t i = 0; i < c.seeds.size(); ++i) out << (i ? ", " : "") << c.seeds[i];
  out << "\nmanifest = " << c.manifest.string() << "\ncache_dir = " << c.cache_dir.string()
      << "\nout_dir = " << c.out_dir.string() << "\nreport = " << c.report.string()
      << "\nplan = " << c.plan.to_string() << "\narch = " << nn::architecture_name(c.arch)
      << "\nepochs = " << c.epochs << "\nbatch_size = " << c.batch_size
      << "\nlr = " << format_double(c.lr) << "\nweight_decay = " << format_double(c.weight_decay)
      << "\njobs = " << c.jobs << "\n";
  return out.str();
}

void save_config(const std::filesystem::path& path, const RunConfig& c) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << serialize_config(c);
}

void apply_environment(RunConfig& c) {
  if (const char* env = std::getenv("MELFORGE_CACHE"); env && *env) c.cache_dir = env;
}

std::string plan_label(const augment::AugmentationPlan& plan) {
  for (const auto& name : augment::preset_names()) {
    if (augment::preset(name) == plan) return name;
  }
  return "custom";
}

}  // namespace melforge::pipeline
