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

#include "tsekit/stft.h"

#include <cmath>

#include "tsekit/fft.h"

namespace tsekit {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kWsumEps = 1e-12;

// Reflect-pad by window/2 on both sides (no edge duplication).
std::vector<double> ReflectPad(const std::vector<double>& x, int64_t pad) {
  const int64_t n = static_cast<int64_t>(x.size());
  TK_REQUIRE(n > pad, "signal too short for reflect padding");
  std::vector<double> out(static_cast<size_t>(n + 2 * pad));
  for (int64_t i = 0; i < pad; ++i) out[i] = x[static_cast<size_t>(pad - i)];
  for (int64_t i = 0; i < n; ++i) out[pad + i] = x[static_cast<size_t>(i)];
  for (int64_t i = 0; i < pad; ++i) out[pad + n + i] = x[static_cast<size_t>(n - 2 - i)];
  return out;
}
}  // namespace

void StftConfig::Validate() const {
  TK_REQUIRE(IsPowerOfTwo(static_cast<size_t>(fft_size)), "fft_size must be a power of two");
  TK_REQUIRE(window_length >= 2 && window_length <= fft_size,
             "window_length must be in [2, fft_size]");
  TK_REQUIRE(hop >= 1 && hop <= window_length, "hop must be in [1, window_length]");
  TK_REQUIRE(sample_rate > 0, "sample_rate must be positive");
}

bool ComplexSpectrogram::all_finite() const {
  for (const auto& v : bins) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  }
  return true;
}

StftTransform::StftTransform(const StftConfig& config) : config_(config) {
  config_.Validate();
  const int n = config_.window_length;
  window_.resize(n);
  for (int i = 0; i < n; ++i) {
    window_[i] = 0.5 - 0.5 * std::cos(kTwoPi * i / n);  // periodic Hann
  }
  // irfft basis restricted to the first window_length output samples:
  // x[j] = (1/N) * [X_0 + (-1)^j X_{N/2} + 2 sum_k (Re X_k cos - Im X_k sin)]
  const int64_t nfft = config_.fft_size;
  const int64_t nbins = nfft / 2 + 1;
  basis_re_ = nn::Tensor({static_cast<int64_t>(n), nbins});
  basis_im_ = nn::Tensor({static_cast<int64_t>(n), nbins});
  for (int64_t j = 0; j < n; ++j) {
    for (int64_t k = 0; k < nbins; ++k) {
      double scale = (k == 0 || k == nfft / 2) ? 1.0 : 2.0;
      double theta = kTwoPi * static_cast<double>(j * k) / static_cast<double>(nfft);
      basis_re_.at(j, k) = scale * std::cos(theta) / static_cast<double>(nfft);
      basis_im_.at(j, k) =
          (k == 0 || k == nfft / 2) ? 0.0 : -scale * std::sin(theta) / static_cast<double>(nfft);
    }
  }
}

int64_t StftTransform::NumFrames(int64_t num_samples) const {
  // centered: padded length = n + window, so frames = 1 + floor(n / hop)
  return 1 + num_samples / config_.hop;
}

ComplexSpectrogram StftTransform::Forward(const AudioSignal& signal) const {
  signal.Validate();
  TK_REQUIRE(signal.length() >= config_.window_length,
             "signal shorter than the analysis window");
  const int64_t pad = config_.window_length / 2;
  std::vector<double> padded = ReflectPad(signal.samples, pad);
  const int64_t num_frames = NumFrames(signal.length());
  const int64_t nbins = num_bins();

  ComplexSpectrogram spec;
  spec.num_bins = nbins;
  spec.num_frames = num_frames;
  spec.fft_size = config_.fft_size;
  spec.window_length = config_.window_length;
  spec.frame_shift = config_.hop;
  spec.sample_rate = signal.sample_rate;
  spec.bins.assign(static_cast<size_t>(nbins * num_frames), {0.0, 0.0});

  std::vector<double> frame(static_cast<size_t>(config_.fft_size), 0.0);
  for (int64_t t = 0; t < num_frames; ++t) {
    const int64_t start = t * config_.hop;
    for (int i = 0; i < config_.window_length; ++i) {
      frame[static_cast<size_t>(i)] = padded[static_cast<size_t>(start + i)] * window_[i];
    }
    auto bins = Rfft(frame);
    for (int64_t f = 0; f < nbins; ++f) spec.at(f, t) = bins[static_cast<size_t>(f)];
  }
  return spec;
}

std::vector<double> StftTransform::WindowOverlapNorm(int64_t padded_len,
                                                     int64_t num_frames) const {
  std::vector<double> wsum(static_cast<size_t>(padded_len), 0.0);
  for (int64_t t = 0; t < num_frames; ++t) {
    const int64_t start = t * config_.hop;
    for (int i = 0; i < config_.window_length; ++i) {
      if (start + i < padded_len) wsum[static_cast<size_t>(start + i)] += window_[i] * window_[i];
    }
  }
  return wsum;
}

AudioSignal StftTransform::Inverse(const ComplexSpectrogram& spec, int64_t length) const {
  TK_REQUIRE(spec.fft_size == config_.fft_size && spec.window_length == config_.window_length &&
                 spec.frame_shift == config_.hop,
             "spectrogram parameters do not match this transform");
  TK_REQUIRE(spec.num_bins == num_bins(), "spectrogram bin count mismatch");
  TK_REQUIRE(spec.num_frames >= 1, "empty spectrogram");
  TK_REQUIRE(spec.all_finite(), "spectrogram has non-finite entries");

  const int64_t pad = config_.window_length / 2;
  const int64_t padded_len = (spec.num_frames - 1) * config_.hop + config_.window_length;
  TK_REQUIRE(length >= 1 && length + pad <= padded_len,
             "requested length exceeds the synthesizable range");

  std::vector<double> acc(static_cast<size_t>(padded_len), 0.0);
  std::vector<std::complex<double>> frame_bins(static_cast<size_t>(num_bins()));
  for (int64_t t = 0; t < spec.num_frames; ++t) {
    for (int64_t f = 0; f < num_bins(); ++f) frame_bins[static_cast<size_t>(f)] = spec.at(f, t);
    std::vector<double> time = Irfft(frame_bins, config_.fft_size);
    const int64_t start = t * config_.hop;
    for (int i = 0; i < config_.window_length; ++i) {
      acc[static_cast<size_t>(start + i)] += time[static_cast<size_t>(i)] * window_[i];
    }
  }
  std::vector<double> wsum = WindowOverlapNorm(padded_len, spec.num_frames);

  AudioSignal out;
  out.sample_rate = spec.sample_rate;
  out.samples.resize(static_cast<size_t>(length));
  for (int64_t i = 0; i < length; ++i) {
    out.samples[static_cast<size_t>(i)] =
        acc[static_cast<size_t>(pad + i)] / (wsum[static_cast<size_t>(pad + i)] + kWsumEps);
  }
  return out;
}

nn::Var StftTransform::InverseVar(const nn::Var& real_part, const nn::Var& imag_part,
                                  int64_t num_samples) const {
  using namespace nn;  // NOLINT
  const int64_t nbins = num_bins();
  TK_REQUIRE(real_part.rows() == nbins && imag_part.rows() == nbins,
             "InverseVar: bin count mismatch");
  TK_REQUIRE(real_part.cols() == imag_part.cols(), "InverseVar: frame count mismatch");
  const int64_t num_frames = real_part.cols();
  const int64_t pad = config_.window_length / 2;
  const int64_t padded_len = (num_frames - 1) * config_.hop + config_.window_length;
  TK_REQUIRE(num_samples >= 1 && num_samples + pad <= padded_len,
             "InverseVar: requested length exceeds the synthesizable range");

  // (win x F) @ (F x T) -> time frames (win x T)
  Var frames = Add(Matmul(Constant(basis_re_), real_part),
                   Matmul(Constant(basis_im_), imag_part));
  Var win = Constant(Tensor({static_cast<int64_t>(window_.size())}, window_));
  frames = MulColVec(frames, win);
  Var acc = OverlapAdd(frames, config_.hop, padded_len);

  std::vector<double> wsum = WindowOverlapNorm(padded_len, num_frames);
  Tensor inv_wsum({padded_len});
  for (int64_t i = 0; i < padded_len; ++i) inv_wsum[i] = 1.0 / (wsum[static_cast<size_t>(i)] + kWsumEps);
  acc = Mul(acc, Constant(inv_wsum));

  Var as_mat = Reshape(acc, {padded_len, 1});
  Var cut = SliceRows(as_mat, pad, num_samples);
  return Reshape(cut, {num_samples});
}

}  // namespace tsekit
