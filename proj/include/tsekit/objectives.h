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

#ifndef TSEKIT_OBJECTIVES_H_
#define TSEKIT_OBJECTIVES_H_

#include <map>
#include <string>
#include <vector>

#include "tsekit/dataset.h"
#include "tsekit/extractor.h"

namespace tsekit {

// Loss bookkeeping: a reproducible total plus its named components
// (si_sdr, ce, l1, l2 where applicable).
struct LossValue {
  double total = 0.0;
  std::map<std::string, double> components;
};

// Graph handle + recorded values, for callers that need Backward().
struct LossResult {
  nn::Var total;
  LossValue value;
};

inline constexpr double kSiSdrEps = 1e-8;

// Negative SI-SDR in dB. Epsilon regularizes both squared norms so an exact
// match stays finite. Rejects an all-zero reference.
double SiSdrLoss(const AudioSignal& s, const AudioSignal& s_hat, double eps = kSiSdrEps);
nn::Var SiSdrLossVar(const nn::Var& s_hat, const AudioSignal& s, double eps = kSiSdrEps);

// Cross entropy -log softmax(logits)[label].
double CeLoss(const std::vector<double>& logits, int64_t label);

// Plain (non-scale-invariant) SDR in dB, capped at +60 on an exact match.
double SdrMetricDb(const AudioSignal& s, const AudioSignal& s_hat);

inline double CombineTotal(double si_sdr, double ce, double gamma) {
  return (1.0 - gamma) * si_sdr + gamma * ce;
}

// total = (1-gamma) * si_sdr + gamma * ce. With gamma == 0 the returned node
// IS the SI-SDR node (no CE term enters the graph), so frozen-encoder runs
// match the pure extraction loss bit for bit.
LossResult CombinedLossVar(const nn::Var& s_hat, const AudioSignal& s, const nn::Var& logits,
                           int64_t label, double gamma);

// Self-estimated speech augmentation, single-optimization form. When the gate
// fired, the first pass runs without gradient tracking and its estimate
// becomes the enrollment of the gradient-tracked second pass; otherwise this
// is exactly the combined loss on the original enrollment.
// enrollment_feature, when given, replaces the fbank of example.enrollment
// (the trainer passes the augmented feature through here); the SSA second
// pass always derives a fresh feature from the estimate.
LossResult SsaSingleLoss(const TseModel& model, const TrainExample& example, double gamma,
                         bool gate_fired, const FbankFeature* enrollment_feature = nullptr);

// Multi-optimization form: total = (1-beta) * L1 + beta * L2, where L1 scores
// the pass with the real enrollment and L2 the pass enrolled on the detached
// first-pass estimate. beta == 0 skips the second pass entirely.
LossResult SsaMultiLoss(const TseModel& model, const TrainExample& example, double gamma,
                        double beta, const FbankFeature* enrollment_feature = nullptr);

}  // namespace tsekit

#endif  // TSEKIT_OBJECTIVES_H_
