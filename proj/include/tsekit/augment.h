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

#ifndef TSEKIT_AUGMENT_H_
#define TSEKIT_AUGMENT_H_

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "tsekit/audio.h"
#include "tsekit/fbank.h"
#include "tsekit/manifest.h"
#include "tsekit/rng.h"

namespace tsekit {

struct AugmentConfig {
  double beta = 0.6;  // probability that each gated augmentation fires
  double snr_low_db = -5.0;
  double snr_high_db = 15.0;
  double t60_low_s = 0.1;
  double t60_high_s = 0.7;
  std::array<double, 3> room_min = {3.0, 3.0, 2.5};   // L x W x H, meters
  std::array<double, 3> room_max = {10.0, 10.0, 4.0};
  // Mask lengths are floor(U(0, bound)): time spans {0..10}, freq spans {0..8}.
  int time_mask_bound = 11;
  int freq_mask_bound = 9;

  void Validate() const;
};

// True with probability beta.
bool Gate(double beta, RandomStream* rng);

// out = c + alpha * n', where n' is the noise looped/cropped to c's length and
// RMS-normalized to c's RMS, and alpha = 10^(-snr/20). A digitally silent c is
// returned unchanged with a warning (the SNR would be undefined).
AudioSignal MixNoise(const AudioSignal& c, const AudioSignal& noise, double snr_db);

struct RirFilter {
  std::vector<double> taps;
  int sample_rate = kSampleRate;
  double t60 = 0.0;
  std::array<double, 3> room = {0, 0, 0};
  std::array<double, 3> source_pos = {0, 0, 0};
  std::array<double, 3> mic_pos = {0, 0, 0};
};

// Interface so a different RIR simulator can be plugged in behind the same
// parameter contract (sampled room/T60 ranges, measured-T60 fidelity).
class RirGenerator {
 public:
  virtual ~RirGenerator() = default;
  virtual RirFilter Generate(const AugmentConfig& config, RandomStream* rng) const = 0;
};

// Shipped implementation: image-source early reflections over a shoebox room
// plus a stochastic late field whose energy envelope decays exactly 60 dB per
// T60. Deterministic given (config, rng state).
class ImageSourceRirGenerator : public RirGenerator {
 public:
  RirFilter Generate(const AugmentConfig& config, RandomStream* rng) const override;
};

// Renders a filter for fixed geometry; Generate samples the geometry and calls
// this. Exposed so tests can pin source/mic positions.
RirFilter RenderRir(const std::array<double, 3>& room, const std::array<double, 3>& source,
                    const std::array<double, 3>& mic, double t60, int sample_rate,
                    RandomStream* rng);

// Full convolution truncated to c's length; peak-normalized only if the
// result would exceed |1|.
AudioSignal ApplyReverb(const AudioSignal& c, const RirFilter& h);

// Applies one time mask and one frequency mask, spans inclusive and clipped
// at the matrix edge. Sampling follows t_s ~ floor(U(0,T)), t_l ~ floor(U(0,11)),
// f_s ~ floor(U(0,F)), f_l ~ floor(U(0,9)).
FbankFeature SpecAugment(const FbankFeature& feature, const AugmentConfig& config,
                         RandomStream* rng);

// --- noise sources ---

enum class SyntheticNoiseKind { kWhite, kPink, kBabble };

AudioSignal SynthesizeNoise(SyntheticNoiseKind kind, int64_t length, RandomStream* rng);

class NoiseSource {
 public:
  virtual ~NoiseSource() = default;
  virtual AudioSignal Draw(int64_t min_length, RandomStream* rng) const = 0;
};

// Draws random files from a noise manifest (MUSAN-style layout).
class ManifestNoiseSource : public NoiseSource {
 public:
  explicit ManifestNoiseSource(std::vector<UtteranceRecord> records);
  AudioSignal Draw(int64_t min_length, RandomStream* rng) const override;

 private:
  std::vector<UtteranceRecord> records_;
};

// Seeded generator cycling white/pink/babble-like noise; for desk-scale runs
// without a noise corpus.
class SyntheticNoiseSource : public NoiseSource {
 public:
  AudioSignal Draw(int64_t min_length, RandomStream* rng) const override;
};

}  // namespace tsekit

#endif  // TSEKIT_AUGMENT_H_
