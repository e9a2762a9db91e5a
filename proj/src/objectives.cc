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

#include "tsekit/objectives.h"

#include <cmath>

namespace tsekit {

using nn::Var;

namespace {
constexpr double kTenOverLn10 = 4.342944819032518;

void CheckPair(const AudioSignal& s, const AudioSignal& s_hat) {
  s.Validate();
  s_hat.Validate();
  TK_REQUIRE(s.length() == s_hat.length(), "loss inputs must have equal length");
}
}  // namespace

double SiSdrLoss(const AudioSignal& s, const AudioSignal& s_hat, double eps) {
  CheckPair(s, s_hat);
  double dot = 0.0, ref_sq = 0.0;
  for (size_t i = 0; i < s.samples.size(); ++i) {
    dot += s_hat.samples[i] * s.samples[i];
    ref_sq += s.samples[i] * s.samples[i];
  }
  TK_REQUIRE(ref_sq > 0.0, "SI-SDR reference must not be identically zero");
  const double scale = dot / ref_sq;
  double proj_sq = 0.0, resid_sq = 0.0;
  for (size_t i = 0; i < s.samples.size(); ++i) {
    const double p = scale * s.samples[i];
    proj_sq += p * p;
    const double r = s_hat.samples[i] - p;
    resid_sq += r * r;
  }
  return -kTenOverLn10 * (std::log(proj_sq + eps) - std::log(resid_sq + eps));
}

Var SiSdrLossVar(const Var& s_hat, const AudioSignal& s, double eps) {
  s.Validate();
  TK_REQUIRE(s_hat.numel() == s.length(), "loss inputs must have equal length");
  double ref_sq = 0.0;
  for (double v : s.samples) ref_sq += v * v;
  TK_REQUIRE(ref_sq > 0.0, "SI-SDR reference must not be identically zero");
  Var ref = nn::Constant(nn::Tensor({s.length()}, s.samples));
  Var scale = nn::MulScalar(nn::Dot(s_hat, ref), 1.0 / ref_sq);
  Var proj = nn::ScaleBy(ref, scale);
  Var resid = nn::Sub(s_hat, proj);
  Var num = nn::AddScalar(nn::Dot(proj, proj), eps);
  Var den = nn::AddScalar(nn::Dot(resid, resid), eps);
  return nn::MulScalar(nn::Sub(nn::Log(num), nn::Log(den)), -kTenOverLn10);
}

double CeLoss(const std::vector<double>& logits, int64_t label) {
  TK_REQUIRE(logits.size() >= 2, "cross entropy needs at least two classes");
  TK_REQUIRE(label >= 0 && label < static_cast<int64_t>(logits.size()),
             "class label out of range");
  double mx = logits[0];
  for (double v : logits) mx = std::max(mx, v);
  double lse = 0.0;
  for (double v : logits) lse += std::exp(v - mx);
  return std::log(lse) + mx - logits[static_cast<size_t>(label)];
}

double SdrMetricDb(const AudioSignal& s, const AudioSignal& s_hat) {
  CheckPair(s, s_hat);
  double sig = 0.0, err = 0.0;
  for (size_t i = 0; i < s.samples.size(); ++i) {
    sig += s.samples[i] * s.samples[i];
    const double d = s.samples[i] - s_hat.samples[i];
    err += d * d;
  }
  TK_REQUIRE(sig > 0.0, "SDR reference must not be identically zero");
  if (err == 0.0) return 60.0;
  return std::min(60.0, 10.0 * std::log10(sig / err));
}

LossResult CombinedLossVar(const Var& s_hat, const AudioSignal& s, const Var& logits,
                           int64_t label, double gamma) {
  TK_REQUIRE(gamma >= 0.0 && gamma <= 1.0, "gamma must be in [0, 1]");
  LossResult out;
  Var si = SiSdrLossVar(s_hat, s);
  out.value.components["si_sdr"] = si.value().scalar();
  if (gamma == 0.0) {
    // frozen-encoder mode: the loss is the SI-SDR node itself
    out.total = si;
    out.value.components["ce"] = 0.0;
  } else {
    TK_REQUIRE(logits.defined(), "gamma > 0 requires classifier logits");
    Var ce = nn::SoftmaxCrossEntropy(logits, label);
    out.value.components["ce"] = ce.value().scalar();
    out.total = nn::Add(nn::MulScalar(si, 1.0 - gamma), nn::MulScalar(ce, gamma));
  }
  out.value.total = out.total.value().scalar();
  return out;
}

namespace {

// One enrollment-conditioned pass plus its combined loss. A prepared feature
// (already augmented by the caller) takes precedence over the raw waveform.
LossResult PassLoss(const TseModel& model, const AudioSignal& mixture,
                    const AudioSignal& target, const AudioSignal& enrollment, int64_t label,
                    double gamma, const FbankFeature* feature = nullptr) {
  Var emb = feature != nullptr ? model.EmbedFeature(*feature) : model.Embed(enrollment);
  Var est = model.ExtractVar(mixture, emb);
  Var logits = gamma > 0.0 ? model.Logits(emb) : Var();
  return CombinedLossVar(est, target, logits, label, gamma);
}

AudioSignal EstimateAsSignal(const Var& est, int sample_rate) {
  AudioSignal out;
  out.sample_rate = sample_rate;
  out.samples = est.value().vec();
  // keep downstream feature extraction finite even if training diverges
  for (auto& v : out.samples) {
    if (!std::isfinite(v)) v = 0.0;
  }
  return out;
}

}  // namespace

LossResult SsaSingleLoss(const TseModel& model, const TrainExample& example, double gamma,
                         bool gate_fired, const FbankFeature* enrollment_feature) {
  if (!gate_fired) {
    // else-branch: identical to the combined loss on the original enrollment
    return PassLoss(model, example.mixture, example.target, example.enrollment,
                    example.speaker_label, gamma, enrollment_feature);
  }
  AudioSignal first_estimate;
  {
    nn::NoGradGuard no_grad;  // first pass is data, not a differentiable path
    Var emb = enrollment_feature != nullptr ? model.EmbedFeature(*enrollment_feature)
                                            : model.Embed(example.enrollment);
    Var est = model.ExtractVar(example.mixture, emb);
    first_estimate = EstimateAsSignal(est, example.mixture.sample_rate);
  }
  return PassLoss(model, example.mixture, example.target, first_estimate,
                  example.speaker_label, gamma);
}

LossResult SsaMultiLoss(const TseModel& model, const TrainExample& example, double gamma,
                        double beta, const FbankFeature* enrollment_feature) {
  TK_REQUIRE(beta >= 0.0 && beta <= 1.0, "beta must be in [0, 1]");

  if (beta == 0.0) {  // second pass may be skipped entirely
    LossResult l1 = PassLoss(model, example.mixture, example.target, example.enrollment,
                             example.speaker_label, gamma, enrollment_feature);
    l1.value.components["l1"] = l1.value.total;
    return l1;
  }

  LossResult out;
  AudioSignal first_estimate;
  double l1_value = 0.0;
  Var l1_node;
  if (beta < 1.0) {
    Var emb1 = enrollment_feature != nullptr ? model.EmbedFeature(*enrollment_feature)
                                             : model.Embed(example.enrollment);
    Var est1 = model.ExtractVar(example.mixture, emb1);
    Var logits1 = gamma > 0.0 ? model.Logits(emb1) : Var();
    LossResult l1 = CombinedLossVar(est1, example.target, logits1, example.speaker_label, gamma);
    l1_node = l1.total;
    l1_value = l1.value.total;
    out.value.components = l1.value.components;
    // the estimate re-enters as enrollment data only; no gradient crosses here
    first_estimate = EstimateAsSignal(est1, example.mixture.sample_rate);
  } else {
    nn::NoGradGuard no_grad;
    Var emb1 = enrollment_feature != nullptr ? model.EmbedFeature(*enrollment_feature)
                                             : model.Embed(example.enrollment);
    Var est1 = model.ExtractVar(example.mixture, emb1);
    first_estimate = EstimateAsSignal(est1, example.mixture.sample_rate);
    l1_value = SiSdrLoss(example.target, first_estimate);  // recorded, not optimized
    if (gamma > 0.0) {
      l1_value = CombineTotal(
          l1_value, CeLoss(model.Logits(emb1).value().vec(), example.speaker_label), gamma);
    }
  }

  LossResult l2 = PassLoss(model, example.mixture, example.target, first_estimate,
                           example.speaker_label, gamma);
  out.value.components["l1"] = l1_value;
  out.value.components["l2"] = l2.value.total;

  if (beta == 1.0) {
    out.total = l2.total;
  } else {
    out.total = nn::Add(nn::MulScalar(l1_node, 1.0 - beta), nn::MulScalar(l2.total, beta));
  }
  out.value.total = out.total.value().scalar();
  return out;
}

}  // namespace tsekit
