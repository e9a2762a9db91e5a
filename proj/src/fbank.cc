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

#include "tsekit/fbank.h"

#include <cmath>

#include "tsekit/fft.h"

namespace tsekit {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
}  // namespace

void FbankConfig::Validate() const {
  TK_REQUIRE(num_mels >= 1, "num_mels must be >= 1");
  TK_REQUIRE(frame_length >= 2 && frame_shift >= 1, "bad frame geometry");
  TK_REQUIRE(IsPowerOfTwo(static_cast<size_t>(fft_size)), "fft_size must be a power of two");
  TK_REQUIRE(fft_size >= frame_length, "fft_size must cover the frame");
  TK_REQUIRE(log_floor > 0.0, "log_floor must be positive");
  TK_REQUIRE(low_freq >= 0.0 && high_freq > low_freq && high_freq <= sample_rate / 2.0,
             "bad mel frequency range");
}

bool FbankFeature::all_finite() const {
  for (double v : frames) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

FbankExtractor::FbankExtractor(const FbankConfig& config) : config_(config) {
  config_.Validate();
  window_.resize(static_cast<size_t>(config_.frame_length));
  for (int i = 0; i < config_.frame_length; ++i) {
    window_[static_cast<size_t>(i)] =
        0.54 - 0.46 * std::cos(kTwoPi * i / (config_.frame_length - 1));  // Hamming
  }

  // Triangular filters, evenly spaced on the mel scale.
  const int nbins = config_.fft_size / 2 + 1;
  const double mel_lo = HzToMel(config_.low_freq);
  const double mel_hi = HzToMel(config_.high_freq);
  const double bin_hz = static_cast<double>(config_.sample_rate) / config_.fft_size;
  mel_filters_.resize(static_cast<size_t>(config_.num_mels));
  mel_first_bin_.resize(static_cast<size_t>(config_.num_mels), 0);
  for (int m = 0; m < config_.num_mels; ++m) {
    double left = mel_lo + (mel_hi - mel_lo) * m / (config_.num_mels + 1);
    double center = mel_lo + (mel_hi - mel_lo) * (m + 1) / (config_.num_mels + 1);
    double right = mel_lo + (mel_hi - mel_lo) * (m + 2) / (config_.num_mels + 1);
    std::vector<double> weights;
    int first = -1;
    for (int k = 0; k < nbins; ++k) {
      double mel = HzToMel(k * bin_hz);
      double w = 0.0;
      if (mel > left && mel < right) {
        w = mel <= center ? (mel - left) / (center - left) : (right - mel) / (right - center);
      }
      if (w > 0.0) {
        if (first < 0) first = k;
        weights.push_back(w);
      } else if (first >= 0) {
        break;
      }
    }
    if (first < 0) first = 0;  // degenerate narrow filter; contributes zero energy
    mel_first_bin_[static_cast<size_t>(m)] = first;
    mel_filters_[static_cast<size_t>(m)] = std::move(weights);
  }
}

int64_t FbankExtractor::NumFrames(int64_t num_samples) const {
  if (num_samples < config_.frame_length) return 0;
  return 1 + (num_samples - config_.frame_length) / config_.frame_shift;
}

FbankFeature FbankExtractor::Compute(const AudioSignal& signal) const {
  signal.Validate();
  TK_REQUIRE(signal.sample_rate == config_.sample_rate, "fbank: sample rate mismatch");
  const int64_t num_frames = NumFrames(signal.length());
  TK_REQUIRE(num_frames >= 1, "signal shorter than one fbank frame");

  FbankFeature feat;
  feat.num_frames = num_frames;
  feat.num_mels = config_.num_mels;
  feat.frame_shift = config_.frame_shift;
  feat.frame_length = config_.frame_length;
  feat.sample_rate = signal.sample_rate;
  feat.frames.assign(static_cast<size_t>(num_frames * config_.num_mels), 0.0);

  std::vector<double> frame(static_cast<size_t>(config_.fft_size), 0.0);
  const double log_floor = std::log(config_.log_floor);
  for (int64_t t = 0; t < num_frames; ++t) {
    const int64_t start = t * config_.frame_shift;
    // dc removal + pre-emphasis + window, all within the frame
    double mean = 0.0;
    for (int i = 0; i < config_.frame_length; ++i) {
      mean += signal.samples[static_cast<size_t>(start + i)];
    }
    mean /= config_.frame_length;
    for (int i = config_.frame_length - 1; i >= 0; --i) {
      double cur = signal.samples[static_cast<size_t>(start + i)] - mean;
      double prev = (i > 0 ? signal.samples[static_cast<size_t>(start + i - 1)] - mean : cur);
      frame[static_cast<size_t>(i)] = (cur - config_.preemphasis * prev) * window_[static_cast<size_t>(i)];
    }
    for (int i = config_.frame_length; i < config_.fft_size; ++i) frame[static_cast<size_t>(i)] = 0.0;

    auto bins = Rfft(frame);
    for (int m = 0; m < config_.num_mels; ++m) {
      const auto& weights = mel_filters_[static_cast<size_t>(m)];
      const int first = mel_first_bin_[static_cast<size_t>(m)];
      double energy = 0.0;
      for (size_t k = 0; k < weights.size(); ++k) {
        energy += weights[k] * std::norm(bins[static_cast<size_t>(first) + k]);
      }
      feat.at(t, m) = energy > config_.log_floor ? std::log(energy) : log_floor;
    }
  }
  return feat;
}

void ApplyMeanNorm(FbankFeature* feature) {
  TK_REQUIRE(feature != nullptr && feature->num_frames >= 1, "empty fbank feature");
  for (int64_t m = 0; m < feature->num_mels; ++m) {
    double mean = 0.0;
    for (int64_t t = 0; t < feature->num_frames; ++t) mean += feature->at(t, m);
    mean /= static_cast<double>(feature->num_frames);
    for (int64_t t = 0; t < feature->num_frames; ++t) feature->at(t, m) -= mean;
  }
}

}  // namespace tsekit
