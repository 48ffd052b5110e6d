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

#include "melforge/data/cache.h"

#include <atomic>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "melforge/audio/wav.h"
#include "melforge/augment/augment.h"
#include "melforge/error.h"

namespace melforge::data {
namespace fs = std::filesystem;
namespace {

std::string stamp_text(const CacheOptions& o, bool with_speed) {
  const auto& f = o.features;
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "sample_rate=%d n_fft=%d hop=%d n_mels=%d fmin=%.17g fmax=%.17g",
                f.sample_rate, f.n_fft, f.hop, f.n_mels, f.fmin, f.fmax);
  std::string s = buf;
  if (with_speed) {
    std::snprintf(buf, sizeof(buf), " speed=%.17g:%.17g:%.17g", o.speed.ratio,
                  o.speed.factor_lo, o.speed.factor_hi);
    s += buf;
  }
  return s + "\n";
}

// Returns true if dir holds a matching stamp; otherwise clears stale images
// and writes a fresh stamp.
bool prepare_dir(const fs::path& dir, const std::string& stamp) {
  fs::create_directories(dir);
  const auto stamp_path = dir / "cache.stamp";
  {
    std::ifstream in(stamp_path);
    std::stringstream ss;
    if (in) ss << in.rdbuf();
    if (in && ss.str() == stamp) return true;
  }
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto ext = e.path().extension();
    if (ext == ".pgm" || ext == ".txt" || e.path().filename() == "index.tsv") {
      fs::remove(e.path());
    }
  }
  std::ofstream out(stamp_path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + stamp_path.string());
  out << stamp;
  return false;
}

bool cached(const fs::path& image) {
  return fs::exists(image) && fs::exists(features::sidecar_path(image));
}

template <typename Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn fn) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  for (unsigned t = 0; t < jobs; ++t) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
  for (auto& w : workers) w.join();
}

}  // namespace

features::MelSpectrogram cache_item_log_mel(const audio::Waveform& clip,
                                            const TrainingItem& item,
                                            std::uint64_t seed,
                                            const CacheOptions& options,
                                            const features::MelExtractor& extractor) {
  if (item.variant == 0) return extractor.log_mel(clip);
  audio::RandomStream rs(seed, item.speed_stream);
  const auto perturbed =
      augment::speed_perturb(clip, rs, options.speed.factor_lo,
                             options.speed.factor_hi, options.speed.ratio);
  return extractor.log_mel(augment::fit_length(perturbed, clip.size()));
}

CacheIndex build_cache(TrainingSet& ts, const Manifest& m, const fs::path& cache_root,
                       const CacheOptions& options) {
  const features::MelExtractor extractor(options.features);
  CacheIndex index;
  index.train_dir = cache_root / ("seed-" + std::to_string(ts.seed));
  index.devel_dir = cache_root / "devel";
  prepare_dir(index.train_dir, stamp_text(options, true));
  prepare_dir(index.devel_dir, stamp_text(options, false));

  // Train items.
  index.train.resize(ts.items.size());
  std::vector<std::string> failures(ts.items.size());
  std::atomic<std::size_t> written{0};
  parallel_for(ts.items.size(), options.jobs, [&](std::size_t i) {
    auto& item = ts.items[i];
    const fs::path rel = item.clip_id + "_v" + std::to_string(item.variant) + ".pgm";
    const fs::path image = index.train_dir / rel;
    index.train[i] = {item.clip_id, item.variant, rel};
    try {
      if (!cached(image)) {
        const auto clip = audio::read_wav(m.entries.at(item.entry_index).path);
        features::write_cached_image(
            image, features::quantize_u8(
                       cache_item_log_mel(clip, item, ts.seed, options, extractor)));
        ++written;
      }
      item.cached_image = image;
    } catch (const std::exception& e) {
      failures[i] = item.clip_id + " v" + std::to_string(item.variant) + ": " + e.what();
    }
  });
  std::string joined;
  for (const auto& f : failures) {
    if (!f.empty()) joined += "\n  " + f;
  }
  if (!joined.empty()) {
    throw Error(ErrorCode::kIoError, "cache build failed for train items:" + joined);
  }
  write_cache_index(index.train_dir / "index.tsv", index.train);

  // Devel clips, never augmented.
  const auto devel = m.indices(Split::kDevel);
  std::vector<std::string> devel_fail(devel.size());
  std::vector<char> ok(devel.size(), 0);
  parallel_for(devel.size(), options.jobs, [&](std::size_t j) {
    const auto& e = m.entries[devel[j]];
    const fs::path image = index.devel_dir / (e.clip_id + ".pgm");
    try {
      if (!cached(image)) {
        features::write_cached_image(
            image, features::quantize_u8(extractor.log_mel(audio::read_wav(e.path))));
        ++written;
      }
      ok[j] = 1;
    } catch (const std::exception& ex) {
      devel_fail[j] = e.clip_id + ": " + ex.what();
    }
  });
  for (std::size_t j = 0; j < devel.size(); ++j) {
    if (ok[j]) {
      const auto& e = m.entries[devel[j]];
      index.devel.push_back({e.clip_id, 0, e.clip_id + ".pgm"});
      index.devel_entries.push_back(devel[j]);
    } else {
      index.errors.push_back(devel_fail[j]);
    }
  }
  write_cache_index(index.devel_dir / "index.tsv", index.devel);
  index.written = written;
  return index;
}

std::vector<CacheEntry> read_cache_index(const fs::path& index_path) {
  std::ifstream in(index_path);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot open " + index_path.string());
  std::vector<CacheEntry> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    CacheEntry e;
    std::string variant, rel;
    if (!std::getline(ls, e.clip_id, '\t') || !std::getline(ls, variant, '\t') ||
        !std::getline(ls, rel)) {
      throw Error(ErrorCode::kParseError,
                  index_path.string() + " line " + std::to_string(line_no));
    }
    e.variant = std::stoi(variant);
    e.relative_path = rel;
    out.push_back(std::move(e));
  }
  return out;
}

void write_cache_index(const fs::path& index_path, const std::vector<CacheEntry>& entries) {
  std::ofstream out(index_path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + index_path.string());
  for (const auto& e : entries) {
    out << e.clip_id << '\t' << e.variant << '\t' << e.relative_path.generic_string() << '\n';
  }
}

}  // namespace melforge::data
