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

#include "melforge/features/mel.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "melforge/audio/resample.h"
#include "melforge/error.h"

namespace melforge::features {
namespace {

constexpr double kMinLogHz = 1000.0;
constexpr double kHzPerMel = 200.0 / 3.0;
constexpr double kMinLogMel = kMinLogHz / kHzPerMel;
const double kLogStep = std::log(6.4) / 27.0;

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// numpy-style "reflect" indexing (edge sample not repeated).
std::size_t reflect_index(long long i, std::size_t n) {
  if (n == 1) return 0;
  const long long period = 2 * (static_cast<long long>(n) - 1);
  i %= period;
  if (i < 0) i += period;
  if (i >= static_cast<long long>(n)) i = period - i;
  return static_cast<std::size_t>(i);
}

}  // namespace

double hz_to_mel(double hz) {
  if (hz < kMinLogHz) return hz / kHzPerMel;
  return kMinLogMel + std::log(hz / kMinLogHz) / kLogStep;
}

double mel_to_hz(double mel) {
  if (mel < kMinLogMel) return mel * kHzPerMel;
  return kMinLogHz * std::exp(kLogStep * (mel - kMinLogMel));
}

std::vector<double> hann_window(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                static_cast<double>(n));
  }
  return w;
}

void fft_inplace(std::span<std::complex<double>> x) {
  const std::size_t n = x.size();
  if (!is_power_of_two(n)) {
    throw Error(ErrorCode::kInvalidArgument,
                "fft: size " + std::to_string(n) + " is not a power of two");
  }
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(x[i], x[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double angle = -2.0 * std::numbers::pi / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(angle), std::sin(angle));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const auto u = x[i + k];
        const auto v = x[i + k + len / 2] * w;
        x[i + k] = u + v;
        x[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

Matrix stft_power(const audio::Waveform& w, int n_fft, int hop) {
  if (w.samples.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "stft_power: empty waveform");
  }
  if (n_fft <= 0 || hop <= 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "stft_power: n_fft and hop must be positive");
  }
  const std::size_t n = w.samples.size();
  const std::size_t nfft = static_cast<std::size_t>(n_fft);
  const std::size_t bins = nfft / 2 + 1;
  const std::size_t frames = 1 + n / static_cast<std::size_t>(hop);
  const auto window = hann_window(nfft);
  const long long half = n_fft / 2;

  Matrix power(bins, frames);
  std::vector<std::complex<double>> buf(nfft);
  for (std::size_t f = 0; f < frames; ++f) {
    const long long start = static_cast<long long>(f) * hop - half;
    for (std::size_t i = 0; i < nfft; ++i) {
      const double x = w.samples[reflect_index(start + static_cast<long long>(i), n)];
      buf[i] = {x * window[i], 0.0};
    }
    fft_inplace(buf);
    for (std::size_t k = 0; k < bins; ++k) power(k, f) = std::norm(buf[k]);
  }
  return power;
}

MelFilterBank build_mel_filterbank(int sample_rate, int n_fft, int n_mels,
                                   double fmin, double fmax) {
  if (sample_rate <= 0 || n_fft <= 0 || n_mels < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "build_mel_filterbank: sample_rate, n_fft and n_mels must be "
                "positive");
  }
  const double nyquist = sample_rate / 2.0;
  if (fmax <= 0.0) fmax = nyquist;
  if (!(fmin < fmax)) {
    throw Error(ErrorCode::kInvalidRange,
                "build_mel_filterbank: fmin (" + std::to_string(fmin) +
                    ") must be below fmax (" + std::to_string(fmax) + ")");
  }
  if (fmin < 0.0 || fmax > nyquist) {
    throw Error(ErrorCode::kInvalidRange,
                "build_mel_filterbank: band must lie within [0, sr/2]");
  }

  const std::size_t bins = static_cast<std::size_t>(n_fft) / 2 + 1;
  std::vector<double> fft_hz(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    fft_hz[k] = static_cast<double>(k) * sample_rate / n_fft;
  }

  const double mel_lo = hz_to_mel(fmin);
  const double mel_hi = hz_to_mel(fmax);
  const auto points = static_cast<std::size_t>(n_mels) + 2;
  std::vector<double> edges(points);
  for (std::size_t i = 0; i < points; ++i) {
    edges[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) /
                                      static_cast<double>(points - 1));
  }

  MelFilterBank fb{Matrix(static_cast<std::size_t>(n_mels), bins), sample_rate,
                   n_fft, fmin, fmax};
  for (std::size_t m = 0; m < static_cast<std::size_t>(n_mels); ++m) {
    const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
    const double norm = 2.0 / (hi - lo);
    bool any = false;
    for (std::size_t k = 0; k < bins; ++k) {
      const double rising = (fft_hz[k] - lo) / (mid - lo);
      const double falling = (hi - fft_hz[k]) / (hi - mid);
      const double v = std::max(0.0, std::min(rising, falling));
      fb.weights(m, k) = v * norm;
      any = any || v > 0.0;
    }
    if (!any) {
      throw Error(ErrorCode::kInvalidRange,
                  "build_mel_filterbank: filter " + std::to_string(m) +
                      " covers no FFT bin; reduce n_mels or raise n_fft");
    }
  }
  return fb;
}

MelSpectrogram to_log_mel(const Matrix& power, const MelFilterBank& fb) {
  if (power.rows != fb.weights.cols) {
    throw Error(ErrorCode::kShapeMismatch,
                "to_log_mel: power spectrogram has " +
                    std::to_string(power.rows) + " bins, filterbank expects " +
                    std::to_string(fb.weights.cols));
  }
  const std::size_t mels = fb.weights.rows;
  const std::size_t frames = power.cols;
  MelSpectrogram out{Matrix(mels, frames), Scale::kLog};
  for (std::size_t m = 0; m < mels; ++m) {
    for (std::size_t f = 0; f < frames; ++f) {
      double acc = 0.0;
      for (std::size_t k = 0; k < power.rows; ++k) {
        acc += fb.weights(m, k) * power(k, f);
      }
      out.values(m, f) = std::log(std::max(acc, kLogFloor));
    }
  }
  return out;
}

MelSpectrogram normalize_local(const MelSpectrogram& m) {
  MelSpectrogram out{m.values, Scale::kNormalized};
  const std::size_t n = m.values.size();
  if (n == 0) return out;
  double mean = 0.0;
  for (double v : m.values.data) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : m.values.data) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n);
  const double sd = std::sqrt(var);
  if (!(sd >= 1e-12)) {
    std::fill(out.values.data.begin(), out.values.data.end(), 0.0);
    return out;
  }
  for (double& v : out.values.data) v = (v - mean) / sd;
  return out;
}

bool is_locally_normalized(const MelSpectrogram& m, double mean_tol,
                           double std_tol) {
  const std::size_t n = m.values.size();
  if (n == 0) return false;
  if (std::all_of(m.values.data.begin(), m.values.data.end(),
                  [](double v) { return v == 0.0; })) {
    return true;
  }
  double mean = 0.0;
  for (double v : m.values.data) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : m.values.data) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(n));
  return std::abs(mean) < mean_tol && std::abs(sd - 1.0) < std_tol;
}

MelExtractor::MelExtractor(FeatureConfig config)
    : config_(config),
      filterbank_(build_mel_filterbank(config.sample_rate, config.n_fft,
                                       config.n_mels, config.fmin,
                                       config.fmax)) {}

MelSpectrogram MelExtractor::log_mel(const audio::Waveform& w) const {
  const auto& at_rate = w.sample_rate == config_.sample_rate
                            ? w
                            : audio::resample_linear(w, config_.sample_rate);
  return to_log_mel(stft_power(at_rate, config_.n_fft, config_.hop),
                    filterbank_);
}

}  // namespace melforge::features
