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

#ifndef MELFORGE_AUDIO_RANDOM_H_
#define MELFORGE_AUDIO_RANDOM_H_

#include <cstdint>
#include <span>
#include <string_view>

namespace melforge::audio {

// Identifies one independent substream under a run seed. step_tag separates
// the different consumers (augmentation kinds, dropout layers, shuffling)
// that draw for the same sample and epoch.
struct StreamId {
  std::uint64_t sample_index = 0;
  std::uint64_t epoch_index = 0;
  std::uint64_t step_tag = 0;

  friend bool operator==(const StreamId&, const StreamId&) = default;
};

// 64-bit FNV-1a; turns a readable tag such as "shift" into a step_tag.
constexpr std::uint64_t tag_of(std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based generator. The substream key is
//   k0 = mix64(seed + G), k1 = mix64(k0 ^ mix64(sample + G)),
//   k2 = mix64(k1 ^ mix64(epoch + 2G)), key = mix64(k2 ^ mix64(tag + 3G))
// with G = 0x9e3779b97f4a7c15, and the i-th word (i = 1, 2, ...) is
// mix64(key + i * G). Nothing is shared between streams, so draw order
// across streams and thread scheduling never affect results.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, StreamId id);

  std::uint64_t seed() const noexcept { return seed_; }
  const StreamId& id() const noexcept { return id_; }
  std::uint64_t draws() const noexcept { return counter_; }

  std::uint64_t next_u64() noexcept;
  // Uniform on [0, 1) with 53 random bits.
  double next_unit() noexcept;
  // Uniform integer in [0, n); n must be > 0.
  std::uint64_t below(std::uint64_t n) noexcept;

 private:
  std::uint64_t seed_;
  StreamId id_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Samplers. Preconditions (lo <= hi, sigma >= 0, 0 <= p <= 1) are checked
// and violations throw melforge::Error(kInvalidArgument).
double draw_uniform(RandomStream& rs, double lo, double hi);
// Box-Muller; always consumes two words so stream positions stay aligned.
double draw_gaussian(RandomStream& rs, double mean, double sigma);
bool draw_bernoulli(RandomStream& rs, double p);

// In-place Fisher-Yates shuffle driven by rs.
void shuffle(std::span<std::size_t> items, RandomStream& rs);

}  // namespace melforge::audio

#endif  // MELFORGE_AUDIO_RANDOM_H_
