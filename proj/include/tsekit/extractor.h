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

#ifndef TSEKIT_EXTRACTOR_H_
#define TSEKIT_EXTRACTOR_H_

#include <memory>
#include <utility>
#include <vector>

#include "tsekit/speaker_encoder.h"
#include "tsekit/stft.h"

namespace tsekit {

// Contiguous, non-overlapping inclusive bin ranges covering [0, F-1].
struct BandSplitScheme {
  std::vector<std::pair<int64_t, int64_t>> bands;

  int64_t num_bands() const { return static_cast<int64_t>(bands.size()); }
  int64_t band_width(int64_t k) const { return bands[k].second - bands[k].first + 1; }
  void Validate(int64_t num_bins) const;

  // Speech split: narrow bands at low frequency, widening upward
  // (100 Hz steps to 1 kHz, 250 Hz to 4 kHz, 500 Hz to 8 kHz, remainder).
  static BandSplitScheme SpeechDefault(int64_t num_bins, int sample_rate, int fft_size);
  // Near-even split into num_bands; for small test models.
  static BandSplitScheme Uniform(int64_t num_bins, int64_t num_bands);
};

struct BsrnnConfig {
  int feature_dim = 256;  // per-band feature width N
  int hidden_dim = 256;   // LSTM hidden per direction
  int depth = 6;          // interleaved sequence/band blocks
  int mask_hidden = 512;  // mask MLP hidden width
};

// Band feature carrier: (num_bands * num_frames) x feature_dim, band-major
// rows (row k*T + t holds band k at frame t).
struct BandFeature {
  nn::Var data;
  int64_t num_bands = 0;
  int64_t num_frames = 0;
  int64_t feature_dim = 0;
};

// Band-split RNN: per-band norm+projection, speaker fusion, interleaved
// residual BLSTM modeling over time and band, per-band complex mask output.
class Bsrnn {
 public:
  Bsrnn(const BandSplitScheme& scheme, const BsrnnConfig& config, int embed_dim,
        const nn::Scope& scope, RandomStream* rng);

  BandFeature BandSplit(const ComplexSpectrogram& spec) const;
  BandFeature FuseSpeaker(const BandFeature& feature, const nn::Var& embedding) const;
  BandFeature Model(const BandFeature& feature) const;
  // Estimated spectrogram = mask (from `modeled`) applied to `mix_spec`.
  // Returns (real, imag), each F x T.
  std::pair<nn::Var, nn::Var> EstimateAndApplyMask(const BandFeature& modeled,
                                                   const ComplexSpectrogram& mix_spec) const;

  const BandSplitScheme& scheme() const { return scheme_; }
  const BsrnnConfig& config() const { return config_; }

 private:
  struct SubLayer {
    nn::LayerNorm norm;
    nn::BiLstm rnn;
    nn::Dense proj;
  };
  struct MaskHead {
    nn::LayerNorm norm;
    nn::Dense hidden;
    nn::Dense out;
  };

  BandSplitScheme scheme_;
  BsrnnConfig config_;
  std::vector<nn::LayerNorm> split_norms_;
  std::vector<nn::Dense> split_projs_;
  nn::Dense adapter_;  // embedding D -> N before replication
  std::vector<SubLayer> seq_layers_, band_layers_;
  std::vector<MaskHead> mask_heads_;
};

// The full pipeline: speaker encoder on enrollment fbank, BSRNN extraction on
// the mixture spectrogram, STFT front ends.
struct TseModelConfig {
  StftConfig stft;
  FbankConfig fbank;
  SpeakerEncoderConfig encoder;
  BsrnnConfig bsrnn;
  int num_bands = 0;  // 0 -> SpeechDefault scheme, else Uniform(num_bands)
  int num_speakers = 2;
  uint64_t init_seed = 1234;
};

class TseModel {
 public:
  explicit TseModel(const TseModelConfig& config);

  // enrollment waveform -> fbank feature (encoder-facing, before SpecAugment)
  FbankFeature EnrollFeature(const AudioSignal& enrollment) const;
  // fbank -> embedding graph node
  nn::Var EmbedFeature(const FbankFeature& feature) const;
  nn::Var Embed(const AudioSignal& enrollment) const;
  nn::Var Logits(const nn::Var& embedding) const;

  // Differentiable extraction: estimate with length = mixture length.
  nn::Var ExtractVar(const AudioSignal& mixture, const nn::Var& embedding) const;
  // Eval path; builds no graph.
  AudioSignal Extract(const AudioSignal& mixture, const AudioSignal& enrollment) const;

  nn::ParameterStore& params() { return store_; }
  const nn::ParameterStore& params() const { return store_; }
  SpeakerEncoder& encoder() { return *encoder_; }
  const SpeakerEncoder& encoder() const { return *encoder_; }
  ClassifierHead& head() { return *head_; }
  Bsrnn& bsrnn() { return *bsrnn_; }
  const StftTransform& stft() const { return *stft_; }
  const TseModelConfig& config() const { return config_; }

 private:
  TseModelConfig config_;
  nn::ParameterStore store_;
  std::unique_ptr<StftTransform> stft_;
  std::unique_ptr<FbankExtractor> fbank_;
  std::unique_ptr<SpeakerEncoder> encoder_;
  std::unique_ptr<ClassifierHead> head_;
  std::unique_ptr<Bsrnn> bsrnn_;
};

}  // namespace tsekit

#endif  // TSEKIT_EXTRACTOR_H_
