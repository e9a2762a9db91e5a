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

#ifndef TSEKIT_SPEAKER_ENCODER_H_
#define TSEKIT_SPEAKER_ENCODER_H_

#include <vector>

#include "tsekit/fbank.h"
#include "tsekit/layers.h"

namespace tsekit {

struct SpeakerEncoderConfig {
  int mel_bins = 80;
  int base_channels = 32;
  std::vector<int> stage_blocks = {3, 4, 6, 3};  // ResNet34-style trunk
  int embed_dim = 256;
  bool mean_norm = true;    // per-utterance fbank mean subtraction before encoding
  bool length_norm = false; // L2-normalize the embedding (off by default)
  int min_frames = 16;      // shorter inputs are zero-padded to this

  void Validate() const;
};

// 2-D convolutional trunk over (time x mel) with residual blocks, statistics
// pooling over time, and a projection to a fixed-dimension embedding. Channel
// normalization keeps train/eval behavior identical and batch-independent.
class SpeakerEncoder {
 public:
  SpeakerEncoder(const SpeakerEncoderConfig& config, const nn::Scope& scope,
                 RandomStream* rng);

  // Embedding as a graph node; gradients reach encoder parameters only in
  // trainable mode. Rejects non-finite features.
  nn::Var Forward(const FbankFeature& feature) const;

  // Convenience eval-path embedding (never builds a graph).
  nn::Tensor Embed(const FbankFeature& feature) const;

  void SetFrozen(bool frozen);
  bool frozen() const { return frozen_; }
  int embed_dim() const { return config_.embed_dim; }
  const SpeakerEncoderConfig& config() const { return config_; }

 private:
  struct Block {
    nn::Conv2d conv1, conv2;
    nn::ChannelNorm norm1, norm2;
    nn::Conv2d skip_conv;
    nn::ChannelNorm skip_norm;
    bool has_skip_proj = false;
  };

  nn::FeatureMap RunBlock(const Block& block, const nn::FeatureMap& x) const;

  SpeakerEncoderConfig config_;
  nn::Conv2d stem_;
  nn::ChannelNorm stem_norm_;
  std::vector<Block> blocks_;
  nn::Dense embed_;
  std::vector<nn::Var> own_params_;
  bool frozen_ = false;
};

// Speaker classification head: logits = W * e (Eq. style, no bias).
class ClassifierHead {
 public:
  ClassifierHead(int num_speakers, int embed_dim, const nn::Scope& scope, RandomStream* rng);
  nn::Var Logits(const nn::Var& embedding) const;
  int num_speakers() const { return num_speakers_; }

 private:
  nn::Var w_;
  int num_speakers_ = 0;
};

// --- verification scoring ---

struct TrialScore {
  double similarity = 0.0;
  bool same_speaker = false;
};

// Equal error rate in [0, 1]: the rate where false-accept equals false-reject,
// with linear interpolation between score thresholds. Requires both classes.
double ComputeEer(const std::vector<TrialScore>& scores);

double CosineSimilarity(const nn::Tensor& a, const nn::Tensor& b);

}  // namespace tsekit

#endif  // TSEKIT_SPEAKER_ENCODER_H_
