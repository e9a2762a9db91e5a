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

#include "tsekit/speaker_encoder.h"

#include <algorithm>
#include <cmath>

namespace tsekit {

using nn::FeatureMap;
using nn::Var;

void SpeakerEncoderConfig::Validate() const {
  TK_REQUIRE(mel_bins >= 2, "mel_bins must be >= 2");
  TK_REQUIRE(base_channels >= 1, "base_channels must be >= 1");
  TK_REQUIRE(!stage_blocks.empty(), "at least one stage required");
  for (int b : stage_blocks) TK_REQUIRE(b >= 1, "each stage needs >= 1 block");
  TK_REQUIRE(embed_dim >= 1, "embed_dim must be >= 1");
  TK_REQUIRE(min_frames >= 1, "min_frames must be >= 1");
  // every stage after the first halves the mel axis
  int downsamples = static_cast<int>(stage_blocks.size()) - 1;
  TK_REQUIRE(mel_bins >> downsamples >= 1, "mel_bins too small for the trunk depth");
}

SpeakerEncoder::SpeakerEncoder(const SpeakerEncoderConfig& config, const nn::Scope& scope,
                               RandomStream* rng)
    : config_(config) {
  config_.Validate();
  nn::ParameterStore* store = scope.store();
  const size_t first_param = store->size();

  stem_ = nn::Conv2d(scope.Sub("stem"), 1, config_.base_channels, 3, 1, 1, rng);
  stem_norm_ = nn::ChannelNorm(scope.Sub("stem_norm"), config_.base_channels);

  int in_ch = config_.base_channels;
  for (size_t stage = 0; stage < config_.stage_blocks.size(); ++stage) {
    const int out_ch = config_.base_channels << stage;
    for (int b = 0; b < config_.stage_blocks[stage]; ++b) {
      const int stride = (stage > 0 && b == 0) ? 2 : 1;
      Block blk;
      auto bs = scope.Sub("stage" + std::to_string(stage)).Sub("block" + std::to_string(b));
      blk.conv1 = nn::Conv2d(bs.Sub("conv1"), in_ch, out_ch, 3, stride, 1, rng);
      blk.norm1 = nn::ChannelNorm(bs.Sub("norm1"), out_ch);
      blk.conv2 = nn::Conv2d(bs.Sub("conv2"), out_ch, out_ch, 3, 1, 1, rng);
      blk.norm2 = nn::ChannelNorm(bs.Sub("norm2"), out_ch);
      blk.has_skip_proj = (stride != 1 || in_ch != out_ch);
      if (blk.has_skip_proj) {
        blk.skip_conv = nn::Conv2d(bs.Sub("skip"), in_ch, out_ch, 1, stride, 0, rng);
        blk.skip_norm = nn::ChannelNorm(bs.Sub("skip_norm"), out_ch);
      }
      blocks_.push_back(std::move(blk));
      in_ch = out_ch;
    }
  }

  const int downsamples = static_cast<int>(config_.stage_blocks.size()) - 1;
  const int final_mels = std::max(1, config_.mel_bins >> downsamples);
  embed_ = nn::Dense(scope.Sub("embed"), 2 * in_ch * final_mels, config_.embed_dim, rng);

  for (size_t i = first_param; i < store->size(); ++i) own_params_.push_back(store->at(i));
}

FeatureMap SpeakerEncoder::RunBlock(const Block& block, const FeatureMap& x) const {
  FeatureMap main = block.conv1.Forward(x);
  main.data = nn::Relu(block.norm1.Forward(main.data));
  main = block.conv2.Forward(main);
  main.data = block.norm2.Forward(main.data);
  FeatureMap skip = x;
  if (block.has_skip_proj) {
    skip = block.skip_conv.Forward(x);
    skip.data = block.skip_norm.Forward(skip.data);
  }
  TK_REQUIRE(skip.h == main.h && skip.w == main.w, "residual shape mismatch");
  main.data = nn::Relu(nn::Add(main.data, skip.data));
  return main;
}

Var SpeakerEncoder::Forward(const FbankFeature& feature) const {
  TK_REQUIRE(feature.num_mels == config_.mel_bins, "encoder mel dimension mismatch");
  TK_REQUIRE(feature.all_finite(), "encoder input has non-finite values");
  std::optional<nn::NoGradGuard> guard;
  if (frozen_) guard.emplace();

  FbankFeature feat = feature;
  if (config_.mean_norm) ApplyMeanNorm(&feat);
  const int64_t t = std::max<int64_t>(feat.num_frames, config_.min_frames);

  nn::Tensor input({1, t * config_.mel_bins});
  for (int64_t i = 0; i < feat.num_frames; ++i) {
    for (int64_t m = 0; m < config_.mel_bins; ++m) {
      input[i * config_.mel_bins + m] = feat.at(i, m);
    }
  }
  FeatureMap map;
  map.data = nn::Constant(std::move(input));
  map.channels = 1;
  map.h = t;
  map.w = config_.mel_bins;

  FeatureMap y = stem_.Forward(map);
  y.data = nn::Relu(stem_norm_.Forward(y.data));
  for (const auto& blk : blocks_) y = RunBlock(blk, y);

  // statistics pooling over the time axis, per (channel, mel) cell
  Var grid = nn::Reshape(y.data, {y.channels * y.h, y.w});
  std::vector<Var> means, stds;
  const double inv_t = 1.0 / static_cast<double>(y.h);
  for (int64_t c = 0; c < y.channels; ++c) {
    Var rows = nn::SliceRows(grid, c * y.h, y.h);         // (T' x W')
    Var mean = nn::MulScalar(nn::SumRows(rows), inv_t);   // (W')
    Var mean_sq = nn::MulScalar(nn::SumRows(nn::Square(rows)), inv_t);
    Var var = nn::Sub(mean_sq, nn::Square(mean));
    stds.push_back(nn::Sqrt(nn::AddScalar(var, 1e-8)));
    means.push_back(mean);
  }
  Var pooled = nn::ConcatVec({nn::ConcatVec(means), nn::ConcatVec(stds)});
  Var emb = embed_.ForwardVec(pooled);
  if (config_.length_norm) {
    Var norm = nn::Sqrt(nn::AddScalar(nn::Dot(emb, emb), 1e-12));
    emb = nn::ScaleBy(emb, nn::Exp(nn::Neg(nn::Log(norm))));
  }
  return emb;
}

nn::Tensor SpeakerEncoder::Embed(const FbankFeature& feature) const {
  nn::NoGradGuard guard;
  return Forward(feature).value();
}

void SpeakerEncoder::SetFrozen(bool frozen) {
  frozen_ = frozen;
  for (auto& p : own_params_) p.set_requires_grad(!frozen);
}

ClassifierHead::ClassifierHead(int num_speakers, int embed_dim, const nn::Scope& scope,
                               RandomStream* rng)
    : num_speakers_(num_speakers) {
  TK_REQUIRE(num_speakers >= 2, "classification needs at least two speakers");
  w_ = scope.Create("weight", nn::FanInInit({num_speakers, embed_dim}, embed_dim, rng));
}

Var ClassifierHead::Logits(const Var& embedding) const {
  TK_REQUIRE(embedding.numel() == w_.cols(), "embedding dimension mismatch");
  return nn::LinearVec(embedding, w_, Var());
}

double ComputeEer(const std::vector<TrialScore>& scores) {
  std::vector<double> target, nontarget;
  for (const auto& s : scores) {
    (s.same_speaker ? target : nontarget).push_back(s.similarity);
  }
  TK_REQUIRE(!target.empty() && !nontarget.empty(),
             "EER needs both target and non-target trials");
  std::sort(target.begin(), target.end());
  std::sort(nontarget.begin(), nontarget.end());

  // Sweep thresholds over all scores; FRR rises with the threshold while FAR
  // falls. Interpolate linearly where the two step curves cross.
  std::vector<double> thresholds;
  thresholds.reserve(scores.size() + 2);
  for (double v : target) thresholds.push_back(v);
  for (double v : nontarget) thresholds.push_back(v);
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  auto frr_at = [&](double th) {  // target scores strictly below threshold
    return static_cast<double>(std::lower_bound(target.begin(), target.end(), th) -
                               target.begin()) /
           static_cast<double>(target.size());
  };
  auto far_at = [&](double th) {  // non-target scores at or above threshold
    return static_cast<double>(nontarget.end() -
                               std::lower_bound(nontarget.begin(), nontarget.end(), th)) /
           static_cast<double>(nontarget.size());
  };

  double prev_th = thresholds.front();
  double prev_frr = frr_at(prev_th), prev_far = far_at(prev_th);
  if (prev_frr >= prev_far) return (prev_frr + prev_far) / 2.0;
  for (size_t i = 1; i < thresholds.size(); ++i) {
    const double th = thresholds[i];
    const double frr = frr_at(th), far = far_at(th);
    if (frr >= far) {
      const double d_prev = prev_far - prev_frr;  // > 0
      const double d_cur = frr - far;             // >= 0
      if (d_prev + d_cur == 0.0) return (frr + far) / 2.0;
      const double w = d_prev / (d_prev + d_cur);
      const double eer_frr = prev_frr + w * (frr - prev_frr);
      const double eer_far = prev_far + w * (far - prev_far);
      return (eer_frr + eer_far) / 2.0;
    }
    prev_frr = frr;
    prev_far = far;
    prev_th = th;
  }
  return (prev_frr + prev_far) / 2.0;
}

double CosineSimilarity(const nn::Tensor& a, const nn::Tensor& b) {
  TK_REQUIRE(a.numel() == b.numel(), "cosine similarity dimension mismatch");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (int64_t i = 0; i < a.numel(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return dot / (std::sqrt(na * nb) + 1e-12);
}

}  // namespace tsekit
