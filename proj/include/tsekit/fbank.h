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

#ifndef TSEKIT_FBANK_H_
#define TSEKIT_FBANK_H_

#include <vector>

#include "tsekit/audio.h"

namespace tsekit {

struct FbankConfig {
  int num_mels = 80;
  int frame_length = 400;  // 25 ms at 16 kHz
  int frame_shift = 160;   // 10 ms
  int fft_size = 512;
  double preemphasis = 0.97;
  double log_floor = 1e-10;  // floor on mel energies before the natural log
  double low_freq = 20.0;
  double high_freq = 7600.0;
  int sample_rate = kSampleRate;

  void Validate() const;
};

// Log-mel energies, T x num_mels row-major.
struct FbankFeature {
  std::vector<double> frames;
  int64_t num_frames = 0;
  int64_t num_mels = 0;
  int frame_shift = 0;
  int frame_length = 0;
  int sample_rate = kSampleRate;

  double& at(int64_t t, int64_t m) { return frames[t * num_mels + m]; }
  double at(int64_t t, int64_t m) const { return frames[t * num_mels + m]; }
  bool all_finite() const;
};

class FbankExtractor {
 public:
  explicit FbankExtractor(const FbankConfig& config);

  // Frames without padding (snip edges): 1 + (n - frame_length) / frame_shift.
  int64_t NumFrames(int64_t num_samples) const;

  FbankFeature Compute(const AudioSignal& signal) const;

  const FbankConfig& config() const { return config_; }

 private:
  FbankConfig config_;
  std::vector<double> window_;
  std::vector<std::vector<double>> mel_filters_;  // per mel: weights over bins
  std::vector<int> mel_first_bin_;
};

// Per-utterance mean subtraction over time (one mean per mel bin).
void ApplyMeanNorm(FbankFeature* feature);

}  // namespace tsekit

#endif  // TSEKIT_FBANK_H_
