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

#ifndef MELFORGE_AUDIO_WAV_H_
#define MELFORGE_AUDIO_WAV_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace melforge::audio {

// The working rate for feature extraction. One second at this rate with hop
// 256 and centered frames gives 87 frames.
inline constexpr int kWorkingSampleRate = 22050;

// Mono audio. Decoded samples are PCM16 / 32768, so |x| <= 1.
struct Waveform {
  std::vector<double> samples;
  int sample_rate = 0;

  std::size_t size() const noexcept { return samples.size(); }
};

// Decodes a RIFF/WAVE PCM16 mono stream. Throws melforge::Error with
// kUnsupportedFormat naming the offending header field.
Waveform decode_wav(std::span<const std::uint8_t> bytes);
// Encodes as PCM16 mono; samples are clamped to the representable range.
std::vector<std::uint8_t> encode_wav(const Waveform& w);

// kNotFound if the file is missing; otherwise as decode_wav.
Waveform read_wav(const std::filesystem::path& path);
void write_wav(const std::filesystem::path& path, const Waveform& w);

}  // namespace melforge::audio

#endif  // MELFORGE_AUDIO_WAV_H_
