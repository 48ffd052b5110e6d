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

#include "melforge/data/synth.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "melforge/audio/random.h"
#include "melforge/error.h"

namespace melforge::data {
namespace fs = std::filesystem;

audio::Waveform synth_clip(Label label, std::uint64_t seed, std::size_t index,
                           int sample_rate) {
  audio::RandomStream rs(seed, {index, static_cast<std::uint64_t>(label_value(label)),
                                audio::tag_of("synth")});
  const std::size_t n = static_cast<std::size_t>(sample_rate);
  const double sr = sample_rate;
  const double f0 = audio::draw_uniform(rs, 90.0, 260.0);
  const double env_rate = audio::draw_uniform(rs, 2.0, 6.0);
  const double env_phase = audio::draw_uniform(rs, 0.0, 2.0 * std::numbers::pi);
  const double noise_level = audio::draw_uniform(rs, 0.05, 0.3);
  const double cutoff = std::min(7000.0, 0.45 * sr);

  std::vector<double> harmonics_phase;
  for (double f = f0; f < cutoff; f += f0) {
    harmonics_phase.push_back(audio::draw_uniform(rs, 0.0, 2.0 * std::numbers::pi));
  }

  std::vector<double> x(n, 0.0);
  double power = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const double time = static_cast<double>(t) / sr;
    double v = 0.0;
    for (std::size_t k = 0; k < harmonics_phase.size(); ++k) {
      const double h = static_cast<double>(k + 1);
      v += std::sin(2.0 * std::numbers::pi * h * f0 * time + harmonics_phase[k]) / h;
    }
    v *= 0.6 + 0.4 * std::sin(2.0 * std::numbers::pi * env_rate * time + env_phase);
    x[t] = v;
    power += v * v;
  }
  const double rms = std::sqrt(power / static_cast<double>(n));
  for (double& v : x) v += audio::draw_gaussian(rs, 0.0, noise_level * rms);

  if (label == Label::kMask) {
    // Causal moving average; zeros at multiples of sr / taps.
    std::vector<double> y(n, 0.0);
    double acc = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      acc += x[t];
      if (t >= kLowPassTaps) acc -= x[t - kLowPassTaps];
      y[t] = acc / static_cast<double>(kLowPassTaps);
    }
    x = std::move(y);
  }

  double peak = 0.0;
  for (double v : x) peak = std::max(peak, std::abs(v));
  const double gain = peak > 0.0 ? 0.5 / peak : 0.0;
  for (double& v : x) v *= gain;
  return audio::Waveform{std::move(x), sample_rate};
}

Manifest synth_corpus(const SynthOptions& options, const fs::path& out_dir) {
  if (options.n_per_class < 1) {
    throw Error(ErrorCode::kInvalidArgument, "synth_corpus: n_per_class must be >= 1");
  }
  if (!(options.devel_fraction >= 0.0 && options.devel_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "synth_corpus: devel_fraction must lie in [0, 1)");
  }
  char stamp_buf[160];
  std::snprintf(stamp_buf, sizeof(stamp_buf),
                "n_per_class=%zu seed=%llu sample_rate=%d devel_fraction=%.17g\n",
                options.n_per_class, static_cast<unsigned long long>(options.seed),
                options.sample_rate, options.devel_fraction);
  const std::string stamp = stamp_buf;
  const auto manifest_path = out_dir / "manifest.csv";
  const auto stamp_path = out_dir / "synth.stamp";

  std::error_code ec;
  fs::create_directories(out_dir / "wav", ec);
  if (ec) {
    throw Error(ErrorCode::kIoError, "cannot create " + (out_dir / "wav").string() +
                                         ": " + ec.message());
  }
  {
    std::ifstream in(stamp_path);
    std::stringstream ss;
    if (in) ss << in.rdbuf();
    if (in && ss.str() == stamp && fs::exists(manifest_path)) {
      return load_manifest(manifest_path);
    }
  }

  const std::size_t n_devel =
      static_cast<std::size_t>(std::floor(options.devel_fraction *
                                          static_cast<double>(options.n_per_class)));
  Manifest m;
  for (Label label : {Label::kClear, Label::kMask}) {
    for (std::size_t i = 0; i < options.n_per_class; ++i) {
      char name[64];
      std::snprintf(name, sizeof(name), "%s_%04zu.wav",
                    std::string(label_name(label)).c_str(), i);
      const fs::path path = out_dir / "wav" / name;
      audio::write_wav(path, synth_clip(label, options.seed, i, options.sample_rate));
      ManifestEntry e;
      e.clip_id = path.stem().string();
      e.path = path;
      e.label = label;
      e.split = i + n_devel < options.n_per_class ? Split::kTrain : Split::kDevel;
      m.entries.push_back(std::move(e));
    }
  }
  write_manifest(manifest_path, m);
  std::ofstream out(stamp_path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + stamp_path.string());
  out << stamp;
  return m;
}

}  // namespace melforge::data
