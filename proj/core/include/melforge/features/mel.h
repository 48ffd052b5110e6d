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

#ifndef MELFORGE_FEATURES_MEL_H_
#define MELFORGE_FEATURES_MEL_H_

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "melforge/audio/wav.h"

namespace melforge::features {

// Dense row-major matrix of doubles.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return data[r * cols + c];
  }
  std::size_t size() const noexcept { return data.size(); }

  friend bool operator==(const Matrix&, const Matrix&) = default;
};

enum class Scale { kPower, kLog, kNormalized };

// n_mels x n_frames. Row 0 is the lowest mel band.
struct MelSpectrogram {
  Matrix values;
  Scale scale = Scale::kLog;

  std::size_t n_mels() const noexcept { return values.rows; }
  std::size_t n_frames() const noexcept { return values.cols; }
};

struct MelFilterBank {
  Matrix weights;  // n_mels x (n_fft / 2 + 1)
  int sample_rate = 0;
  int n_fft = 0;
  double fmin = 0.0;
  double fmax = 0.0;
};

// Extraction parameters; fmax <= 0 means sample_rate / 2.
struct FeatureConfig {
  int sample_rate = audio::kWorkingSampleRate;
  int n_fft = 512;
  int hop = 256;
  int n_mels = 64;
  double fmin = 0.0;
  double fmax = 0.0;
};

inline constexpr double kLogFloor = 1e-10;

// Slaney mel scale: linear below 1 kHz, logarithmic above.
double hz_to_mel(double hz);
double mel_to_hz(double mel);

// Periodic Hann window of length n.
std::vector<double> hann_window(std::size_t n);

// In-place iterative radix-2 FFT; size must be a power of two.
void fft_inplace(std::span<std::complex<double>> x);

// Power spectrogram, (n_fft/2 + 1) x (1 + len/hop). Frames are centered: the
// signal is reflect-padded by n_fft/2 on both sides before framing.
Matrix stft_power(const audio::Waveform& w, int n_fft = 512, int hop = 256);

// Triangular filters with peaks equally spaced in mel between fmin and fmax,
// each scaled by 2 / (upper edge - lower edge in Hz). Throws kInvalidRange
// when fmin >= fmax, fmax > sr/2, or a filter would cover no FFT bin.
MelFilterBank build_mel_filterbank(int sample_rate, int n_fft = 512,
                                   int n_mels = 64, double fmin = 0.0,
                                   double fmax = 0.0);

// ln(max(weights * power, 1e-10)). kShapeMismatch if the bin counts differ.
MelSpectrogram to_log_mel(const Matrix& power, const MelFilterBank& fb);

// Zero mean, unit population variance over the whole matrix. A matrix with
// std < 1e-12 maps to zeros.
MelSpectrogram normalize_local(const MelSpectrogram& m);

// True when m is the zero matrix or has |mean| < mean_tol and
// |std - 1| < std_tol.
bool is_locally_normalized(const MelSpectrogram& m, double mean_tol = 1e-6,
                           double std_tol = 1e-4);

// Resample-to-working-rate + STFT + filterbank + log, with the filterbank
// built once.
class MelExtractor {
 public:
  explicit MelExtractor(FeatureConfig config = {});

  const FeatureConfig& config() const noexcept { return config_; }
  const MelFilterBank& filterbank() const noexcept { return filterbank_; }

  MelSpectrogram log_mel(const audio::Waveform& w) const;

 private:
  FeatureConfig config_;
  MelFilterBank filterbank_;
};

}  // namespace melforge::features

#endif  // MELFORGE_FEATURES_MEL_H_
