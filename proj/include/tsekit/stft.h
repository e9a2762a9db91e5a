// Copyright (c) 2026 tsekit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TSEKIT_STFT_H_
#define TSEKIT_STFT_H_

#include <complex>
#include <vector>

#include "tsekit/audio.h"
#include "tsekit/autodiff.h"

namespace tsekit {

struct StftConfig {
  int fft_size = 512;
  int window_length = 512;  // 32 ms at 16 kHz
  int hop = 128;            // 8 ms
  int sample_rate = kSampleRate;

  void Validate() const;
};

// Fullband complex spectrogram, F x T with F = fft_size/2 + 1.
struct ComplexSpectrogram {
  std::vector<std::complex<double>> bins;  // row-major F x T
  int64_t num_bins = 0;
  int64_t num_frames = 0;
  int fft_size = 0;
  int window_length = 0;
  int frame_shift = 0;
  int sample_rate = kSampleRate;

  std::complex<double>& at(int64_t f, int64_t t) { return bins[f * num_frames + t]; }
  std::complex<double> at(int64_t f, int64_t t) const { return bins[f * num_frames + t]; }
  bool all_finite() const;
};

// Analysis/synthesis with a Hann window, centered via reflect padding.
// Synthesis normalizes by the squared-window overlap, so a round trip
// reconstructs the input to machine precision.
class StftTransform {
 public:
  explicit StftTransform(const StftConfig& config);

  // Frame count for an input of n samples (after center padding).
  int64_t NumFrames(int64_t num_samples) const;

  ComplexSpectrogram Forward(const AudioSignal& signal) const;
  AudioSignal Inverse(const ComplexSpectrogram& spec, int64_t length) const;

  // Differentiable synthesis: spec given as separate real/imag (F x T) vars.
  // Identical math to Inverse (shared window/normalization), built from
  // autodiff ops so gradients flow back into the masked spectrogram.
  nn::Var InverseVar(const nn::Var& real_part, const nn::Var& imag_part,
                     int64_t num_samples) const;

  const StftConfig& config() const { return config_; }
  int64_t num_bins() const { return config_.fft_size / 2 + 1; }

 private:
  std::vector<double> WindowOverlapNorm(int64_t padded_len, int64_t num_frames) const;

  StftConfig config_;
  std::vector<double> window_;
  // irfft as an explicit linear map (window_length x num_bins), for InverseVar
  nn::Tensor basis_re_, basis_im_;
};

}  // namespace tsekit

#endif  // TSEKIT_STFT_H_
