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

#include "tsekit/extractor.h"

#include <algorithm>
#include <cmath>

namespace tsekit {

using nn::Var;

void BandSplitScheme::Validate(int64_t num_bins) const {
  TK_REQUIRE(!bands.empty(), "band scheme has no bands");
  int64_t expect = 0;
  for (const auto& [lo, hi] : bands) {
    TK_REQUIRE(lo == expect, "bands must be contiguous and non-overlapping");
    TK_REQUIRE(hi >= lo, "band range inverted");
    expect = hi + 1;
  }
  TK_REQUIRE(expect == num_bins, "bands must cover [0, F-1] exactly");
}

BandSplitScheme BandSplitScheme::SpeechDefault(int64_t num_bins, int sample_rate,
                                               int fft_size) {
  const double bin_hz = static_cast<double>(sample_rate) / fft_size;
  std::vector<double> edges_hz;
  for (double f = 100.0; f <= 1000.0; f += 100.0) edges_hz.push_back(f);
  for (double f = 1250.0; f <= 4000.0; f += 250.0) edges_hz.push_back(f);
  for (double f = 4500.0; f <= 8000.0; f += 500.0) edges_hz.push_back(f);

  BandSplitScheme scheme;
  int64_t start = 0;
  for (double edge : edges_hz) {
    int64_t end = std::min<int64_t>(num_bins - 1, static_cast<int64_t>(std::llround(edge / bin_hz)) - 1);
    if (end < start) continue;
    scheme.bands.emplace_back(start, end);
    start = end + 1;
    if (start >= num_bins) break;
  }
  if (start < num_bins) scheme.bands.emplace_back(start, num_bins - 1);  // remainder band
  scheme.Validate(num_bins);
  return scheme;
}

BandSplitScheme BandSplitScheme::Uniform(int64_t num_bins, int64_t num_bands) {
  TK_REQUIRE(num_bands >= 1 && num_bands <= num_bins, "bad uniform band count");
  BandSplitScheme scheme;
  int64_t start = 0;
  for (int64_t k = 0; k < num_bands; ++k) {
    int64_t end = num_bins * (k + 1) / num_bands - 1;
    scheme.bands.emplace_back(start, end);
    start = end + 1;
  }
  scheme.Validate(num_bins);
  return scheme;
}

Bsrnn::Bsrnn(const BandSplitScheme& scheme, const BsrnnConfig& config, int embed_dim,
             const nn::Scope& scope, RandomStream* rng)
    : scheme_(scheme), config_(config) {
  TK_REQUIRE(config_.feature_dim >= 1 && config_.hidden_dim >= 1 && config_.depth >= 1 &&
                 config_.mask_hidden >= 1,
             "invalid bsrnn dimensions");
  const int64_t num_bands = scheme_.num_bands();
  auto split_scope = scope.Sub("split");
  for (int64_t k = 0; k < num_bands; ++k) {
    const int64_t width = 2 * scheme_.band_width(k);  // real+imag stacked
    auto bs = split_scope.Sub("band" + std::to_string(k));
    split_norms_.emplace_back(bs.Sub("norm"), width);
    split_projs_.emplace_back(bs.Sub("fc"), width, config_.feature_dim, rng);
  }
  adapter_ = nn::Dense(scope.Sub("adapter"), embed_dim, config_.feature_dim, rng);

  for (int d = 0; d < config_.depth; ++d) {
    auto block = scope.Sub("block" + std::to_string(d));
    SubLayer seq;
    seq.norm = nn::LayerNorm(block.Sub("seq.norm"), config_.feature_dim);
    seq.rnn = nn::BiLstm(block.Sub("seq.rnn"), config_.feature_dim, config_.hidden_dim, rng);
    seq.proj = nn::Dense(block.Sub("seq.fc"), 2 * config_.hidden_dim, config_.feature_dim, rng);
    seq_layers_.push_back(std::move(seq));
    SubLayer band;
    band.norm = nn::LayerNorm(block.Sub("band.norm"), config_.feature_dim);
    band.rnn = nn::BiLstm(block.Sub("band.rnn"), config_.feature_dim, config_.hidden_dim, rng);
    band.proj = nn::Dense(block.Sub("band.fc"), 2 * config_.hidden_dim, config_.feature_dim, rng);
    band_layers_.push_back(std::move(band));
  }

  auto mask_scope = scope.Sub("mask");
  for (int64_t k = 0; k < num_bands; ++k) {
    auto ms = mask_scope.Sub("band" + std::to_string(k));
    MaskHead head;
    head.norm = nn::LayerNorm(ms.Sub("norm"), config_.feature_dim);
    head.hidden = nn::Dense(ms.Sub("fc1"), config_.feature_dim, config_.mask_hidden, rng);
    head.out = nn::Dense(ms.Sub("fc2"), config_.mask_hidden, 2 * scheme_.band_width(k), rng);
    mask_heads_.push_back(std::move(head));
  }
}

BandFeature Bsrnn::BandSplit(const ComplexSpectrogram& spec) const {
  scheme_.Validate(spec.num_bins);
  TK_REQUIRE(spec.all_finite(), "spectrogram has non-finite entries");
  const int64_t num_frames = spec.num_frames;
  std::vector<Var> parts;
  parts.reserve(scheme_.bands.size());
  for (int64_t k = 0; k < scheme_.num_bands(); ++k) {
    const auto [lo, hi] = scheme_.bands[static_cast<size_t>(k)];
    const int64_t width = hi - lo + 1;
    nn::Tensor frames({num_frames, 2 * width});
    for (int64_t t = 0; t < num_frames; ++t) {
      for (int64_t f = lo; f <= hi; ++f) {
        frames.at(t, f - lo) = spec.at(f, t).real();
        frames.at(t, width + f - lo) = spec.at(f, t).imag();
      }
    }
    Var x = nn::Constant(std::move(frames));
    x = split_norms_[static_cast<size_t>(k)].Forward(x);
    parts.push_back(split_projs_[static_cast<size_t>(k)].Forward(x));  // (T x N)
  }
  BandFeature out;
  out.data = nn::ConcatRows(parts);
  out.num_bands = scheme_.num_bands();
  out.num_frames = num_frames;
  out.feature_dim = config_.feature_dim;
  return out;
}

BandFeature Bsrnn::FuseSpeaker(const BandFeature& feature, const Var& embedding) const {
  Var adapted = adapter_.ForwardVec(embedding);  // (N)
  BandFeature out = feature;
  out.data = nn::MulRowVec(feature.data, adapted);
  return out;
}

BandFeature Bsrnn::Model(const BandFeature& feature) const {
  const int64_t num_bands = feature.num_bands;
  const int64_t num_frames = feature.num_frames;
  TK_REQUIRE(num_bands == scheme_.num_bands(), "band count mismatch");

  // layout permutations between band-major and time-major row orders
  std::vector<int64_t> to_time(static_cast<size_t>(num_bands * num_frames));
  std::vector<int64_t> to_band(static_cast<size_t>(num_bands * num_frames));
  for (int64_t k = 0; k < num_bands; ++k) {
    for (int64_t t = 0; t < num_frames; ++t) {
      to_time[static_cast<size_t>(t * num_bands + k)] = k * num_frames + t;
      to_band[static_cast<size_t>(k * num_frames + t)] = t * num_bands + k;
    }
  }

  Var x = feature.data;  // band-major (K*T x N)
  for (int d = 0; d < config_.depth; ++d) {
    {  // sequence-level: scan frames, bands as the batch
      const SubLayer& layer = seq_layers_[static_cast<size_t>(d)];
      Var y = layer.norm.Forward(x);
      y = nn::GatherRows(y, to_time);
      std::vector<Var> steps;
      steps.reserve(static_cast<size_t>(num_frames));
      for (int64_t t = 0; t < num_frames; ++t) {
        steps.push_back(nn::SliceRows(y, t * num_bands, num_bands));
      }
      Var h = nn::ConcatRows(layer.rnn.Forward(steps));  // time-major (T*K x 2H)
      Var corr = nn::GatherRows(layer.proj.Forward(h), to_band);
      x = nn::Add(x, corr);
    }
    {  // band-level: scan bands, frames as the batch
      const SubLayer& layer = band_layers_[static_cast<size_t>(d)];
      Var y = layer.norm.Forward(x);
      std::vector<Var> steps;
      steps.reserve(static_cast<size_t>(num_bands));
      for (int64_t k = 0; k < num_bands; ++k) {
        steps.push_back(nn::SliceRows(y, k * num_frames, num_frames));
      }
      Var h = nn::ConcatRows(layer.rnn.Forward(steps));  // band-major (K*T x 2H)
      Var corr = layer.proj.Forward(h);
      x = nn::Add(x, corr);
    }
  }
  BandFeature out = feature;
  out.data = x;
  return out;
}

std::pair<Var, Var> Bsrnn::EstimateAndApplyMask(const BandFeature& modeled,
                                                const ComplexSpectrogram& mix_spec) const {
  scheme_.Validate(mix_spec.num_bins);
  TK_REQUIRE(modeled.num_frames == mix_spec.num_frames, "frame count mismatch");
  const int64_t num_frames = modeled.num_frames;

  std::vector<Var> mask_re_parts, mask_im_parts;
  for (int64_t k = 0; k < scheme_.num_bands(); ++k) {
    const MaskHead& head = mask_heads_[static_cast<size_t>(k)];
    const int64_t width = scheme_.band_width(k);
    Var band = nn::SliceRows(modeled.data, k * num_frames, num_frames);  // (T x N)
    Var y = head.norm.Forward(band);
    y = nn::Tanh(head.hidden.Forward(y));
    y = head.out.Forward(y);  // (T x 2w)
    mask_re_parts.push_back(nn::Transpose(nn::SliceCols(y, 0, width)));      // (w x T)
    mask_im_parts.push_back(nn::Transpose(nn::SliceCols(y, width, width)));  // (w x T)
  }
  Var mask_re = nn::ConcatRows(mask_re_parts);  // (F x T)
  Var mask_im = nn::ConcatRows(mask_im_parts);

  nn::Tensor x_re({mix_spec.num_bins, num_frames}), x_im({mix_spec.num_bins, num_frames});
  for (int64_t f = 0; f < mix_spec.num_bins; ++f) {
    for (int64_t t = 0; t < num_frames; ++t) {
      x_re.at(f, t) = mix_spec.at(f, t).real();
      x_im.at(f, t) = mix_spec.at(f, t).imag();
    }
  }
  Var xr = nn::Constant(std::move(x_re));
  Var xi = nn::Constant(std::move(x_im));
  // complex ratio mask applied to the mixture spectrogram
  Var est_re = nn::Sub(nn::Mul(mask_re, xr), nn::Mul(mask_im, xi));
  Var est_im = nn::Add(nn::Mul(mask_re, xi), nn::Mul(mask_im, xr));
  return {est_re, est_im};
}

// --- TseModel ---

TseModel::TseModel(const TseModelConfig& config) : config_(config) {
  config_.stft.Validate();
  config_.fbank.Validate();
  TK_REQUIRE(config_.fbank.num_mels == config_.encoder.mel_bins,
             "fbank mel count must match the encoder input");
  stft_ = std::make_unique<StftTransform>(config_.stft);
  fbank_ = std::make_unique<FbankExtractor>(config_.fbank);

  RandomStream rng(config_.init_seed);
  nn::Scope root(&store_, "");
  encoder_ = std::make_unique<SpeakerEncoder>(config_.encoder, root.Sub("encoder"), &rng);
  head_ = std::make_unique<ClassifierHead>(config_.num_speakers, config_.encoder.embed_dim,
                                           root.Sub("head"), &rng);
  const int64_t num_bins = stft_->num_bins();
  BandSplitScheme scheme =
      config_.num_bands > 0
          ? BandSplitScheme::Uniform(num_bins, config_.num_bands)
          : BandSplitScheme::SpeechDefault(num_bins, config_.stft.sample_rate,
                                           config_.stft.fft_size);
  bsrnn_ = std::make_unique<Bsrnn>(scheme, config_.bsrnn, config_.encoder.embed_dim,
                                   root.Sub("bsrnn"), &rng);
}

FbankFeature TseModel::EnrollFeature(const AudioSignal& enrollment) const {
  AudioSignal padded = enrollment;
  // enrollment shorter than one fbank frame is padded out (short-input rule)
  const int64_t min_len = config_.fbank.frame_length;
  if (padded.length() < min_len) padded.samples.resize(static_cast<size_t>(min_len), 0.0);
  return fbank_->Compute(padded);
}

Var TseModel::EmbedFeature(const FbankFeature& feature) const {
  return encoder_->Forward(feature);
}

Var TseModel::Embed(const AudioSignal& enrollment) const {
  return EmbedFeature(EnrollFeature(enrollment));
}

Var TseModel::Logits(const Var& embedding) const { return head_->Logits(embedding); }

Var TseModel::ExtractVar(const AudioSignal& mixture, const Var& embedding) const {
  ComplexSpectrogram spec = stft_->Forward(mixture);
  BandFeature split = bsrnn_->BandSplit(spec);
  BandFeature fused = bsrnn_->FuseSpeaker(split, embedding);
  BandFeature modeled = bsrnn_->Model(fused);
  auto [est_re, est_im] = bsrnn_->EstimateAndApplyMask(modeled, spec);
  return stft_->InverseVar(est_re, est_im, mixture.length());
}

AudioSignal TseModel::Extract(const AudioSignal& mixture, const AudioSignal& enrollment) const {
  nn::NoGradGuard guard;
  Var est = ExtractVar(mixture, Embed(enrollment));
  AudioSignal out;
  out.sample_rate = mixture.sample_rate;
  out.samples = est.value().vec();
  return out;
}

}  // namespace tsekit
