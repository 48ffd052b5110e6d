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

#include "melforge/audio/random.h"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "melforge/error.h"

namespace melforge::audio {
namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t derive_key(std::uint64_t seed, const StreamId& id) {
  std::uint64_t k = mix64(seed + kGolden);
  k = mix64(k ^ mix64(id.sample_index + kGolden));
  k = mix64(k ^ mix64(id.epoch_index + 2 * kGolden));
  k = mix64(k ^ mix64(id.step_tag + 3 * kGolden));
  return k;
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, StreamId id)
    : seed_(seed), id_(id), key_(derive_key(seed, id)) {}

std::uint64_t RandomStream::next_u64() noexcept {
  ++counter_;
  return mix64(key_ + counter_ * kGolden);
}

double RandomStream::next_unit() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t RandomStream::below(std::uint64_t n) noexcept {
  const unsigned __int128 wide =
      static_cast<unsigned __int128>(next_u64()) * n;
  return static_cast<std::uint64_t>(wide >> 64);
}

double draw_uniform(RandomStream& rs, double lo, double hi) {
  if (!(lo <= hi)) {
    throw Error(ErrorCode::kInvalidArgument,
                "draw_uniform: lo (" + std::to_string(lo) +
                    ") must not exceed hi (" + std::to_string(hi) + ")");
  }
  const double u = rs.next_unit();
  if (lo == hi) return lo;
  const double v = lo + (hi - lo) * u;
  return v < hi ? v : lo;
}

double draw_gaussian(RandomStream& rs, double mean, double sigma) {
  if (!(sigma >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "draw_gaussian: sigma must be >= 0");
  }
  // u1 in (0, 1] keeps the log finite.
  const double u1 = 1.0 - rs.next_unit();
  const double u2 = rs.next_unit();
  if (sigma == 0.0) return mean;
  const double z = std::sqrt(-2.0 * std::log(u1)) *
                   std::cos(2.0 * std::numbers::pi * u2);
  return mean + sigma * z;
}

bool draw_bernoulli(RandomStream& rs, double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "draw_bernoulli: p must lie in [0, 1]");
  }
  return rs.next_unit() < p;
}

void shuffle(std::span<std::size_t> items, RandomStream& rs) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rs.below(i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace melforge::audio
