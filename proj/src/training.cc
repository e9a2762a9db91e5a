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

#include "tsekit/training.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace tsekit {

std::string AugmentationName(Augmentation a) {
  switch (a) {
    case Augmentation::kNoise: return "noise";
    case Augmentation::kReverb: return "reverb";
    case Augmentation::kSpecAugment: return "specaugment";
    case Augmentation::kSsaSingle: return "ssa_single";
    case Augmentation::kSsaMulti: return "ssa_multi";
  }
  return "?";
}

Augmentation AugmentationFromName(const std::string& name) {
  for (Augmentation a : {Augmentation::kNoise, Augmentation::kReverb,
                         Augmentation::kSpecAugment, Augmentation::kSsaSingle,
                         Augmentation::kSsaMulti}) {
    if (AugmentationName(a) == name) return a;
  }
  throw InvalidInput("unknown augmentation: " + name);
}

void TrainConfig::Validate() const {
  TK_REQUIRE(epochs >= 1, "epochs must be >= 1");
  TK_REQUIRE(batch_size >= 1, "batch_size must be >= 1");
  TK_REQUIRE(segment_seconds > 0.0, "segment_seconds must be positive");
  TK_REQUIRE(initial_lr > 0.0 && final_lr > 0.0 && final_lr <= initial_lr,
             "need 0 < final_lr <= initial_lr");
  TK_REQUIRE(beta >= 0.0 && beta <= 1.0, "beta must be a probability");
  TK_REQUIRE(gamma >= 0.0 && gamma <= 1.0, "gamma must be in [0, 1]");
  bool has_single = std::count(augmentations.begin(), augmentations.end(),
                               Augmentation::kSsaSingle) > 0;
  bool has_multi = std::count(augmentations.begin(), augmentations.end(),
                              Augmentation::kSsaMulti) > 0;
  TK_REQUIRE(!(has_single && has_multi),
             "ssa_single and ssa_multi are alternative loss forms, enable only one");
  if (curriculum.has_value()) {
    TK_REQUIRE(curriculum->first >= 0 && curriculum->second >= 0 &&
                   curriculum->first + curriculum->second == epochs,
               "curriculum epochs must sum to the epoch count");
  }
}

double LrSchedule(int64_t current_iter, int64_t max_iter, double initial_lr, double final_lr) {
  TK_REQUIRE(max_iter >= 1, "max_iter must be >= 1");
  TK_REQUIRE(current_iter >= 0 && current_iter <= max_iter, "iteration out of range");
  TK_REQUIRE(initial_lr > 0.0 && final_lr > 0.0, "learning rates must be positive");
  const double frac = static_cast<double>(current_iter) / static_cast<double>(max_iter);
  return initial_lr * std::exp(frac * std::log(final_lr / initial_lr));
}

std::string StepRecordHeader() {
  return "step\tepoch\tlr\ttotal\tsi_sdr\tce\tl1\tl2\tevents\taborted";
}

std::string FormatStepRecord(const StepRecord& r) {
  auto comp = [&](const char* name) {
    auto it = r.loss.components.find(name);
    return it == r.loss.components.end() ? std::string("-") : std::to_string(it->second);
  };
  std::ostringstream os;
  os << r.step << '\t' << r.epoch << '\t' << r.lr << '\t' << r.loss.total << '\t'
     << comp("si_sdr") << '\t' << comp("ce") << '\t' << comp("l1") << '\t' << comp("l2")
     << '\t';
  if (r.events.empty()) {
    os << '-';
  } else {
    for (size_t i = 0; i < r.events.size(); ++i) {
      if (i) os << ',';
      os << r.events[i];
    }
  }
  os << '\t' << (r.aborted ? "1" : "0");
  if (r.aborted) os << '\t' << r.note;
  return os.str();
}

Trainer::Trainer(TseModel* model, const TrainConfig& config,
                 const AugmentConfig& augment_config, const ExampleSource* source,
                 const NoiseSource* noise_source, const RirGenerator* rir_generator,
                 std::string config_hash, std::string config_text)
    : model_(model),
      config_(config),
      augment_config_(augment_config),
      source_(source),
      noise_source_(noise_source),
      rir_generator_(rir_generator),
      config_hash_(std::move(config_hash)),
      config_text_(std::move(config_text)),
      optimizer_(&model->params(), config.adam) {
  config_.Validate();
  augment_config_.Validate();
  TK_REQUIRE(source_ != nullptr && source_->Size() > 0, "training source is empty");
  model_->encoder().SetFrozen(config_.frozen_encoder);
  if (config_.frozen_encoder) config_.gamma = 0.0;
  if (HasAug(Augmentation::kNoise)) {
    TK_REQUIRE(noise_source_ != nullptr, "noise augmentation needs a noise source");
  }
  if (HasAug(Augmentation::kReverb)) {
    TK_REQUIRE(rir_generator_ != nullptr, "reverb augmentation needs an RIR generator");
  }
  steps_per_epoch_ = (source_->Size() + config_.batch_size - 1) / config_.batch_size;
  max_iter_ = steps_per_epoch_ * config_.epochs;
}

bool Trainer::HasAug(Augmentation a) const {
  return std::count(config_.augmentations.begin(), config_.augmentations.end(), a) > 0;
}

FbankFeature Trainer::PrepareEnrollment(const TrainExample& example, bool allow_augmentation,
                                        RandomStream* rng,
                                        std::vector<std::string>* events) const {
  AudioSignal enrollment = example.enrollment;
  if (allow_augmentation && HasAug(Augmentation::kNoise) &&
      Gate(augment_config_.beta, rng)) {
    const double snr = rng->Uniform(augment_config_.snr_low_db, augment_config_.snr_high_db);
    AudioSignal noise = noise_source_->Draw(enrollment.length(), rng);
    enrollment = MixNoise(enrollment, noise, snr);
    events->push_back("noise");
  }
  if (allow_augmentation && HasAug(Augmentation::kReverb) &&
      Gate(augment_config_.beta, rng)) {
    RirFilter rir = rir_generator_->Generate(augment_config_, rng);
    enrollment = ApplyReverb(enrollment, rir);
    events->push_back("reverb");
  }
  FbankFeature feature = model_->EnrollFeature(enrollment);
  if (allow_augmentation && HasAug(Augmentation::kSpecAugment) &&
      Gate(augment_config_.beta, rng)) {
    feature = SpecAugment(feature, augment_config_, rng);
    events->push_back("specaugment");
  }
  return feature;
}

StepRecord Trainer::TrainStep(const std::vector<int64_t>& example_indices, int64_t step_index,
                              int64_t epoch) {
  TK_REQUIRE(!example_indices.empty(), "empty batch");
  const bool plain_phase =
      config_.curriculum.has_value() && epoch < config_.curriculum->first;
  const bool allow_augmentation = !plain_phase;

  StepRecord record;
  record.step = step_index;
  record.epoch = epoch;
  record.lr = LrSchedule(step_index, max_iter_, config_.initial_lr, config_.final_lr);

  optimizer_.ZeroGrad();
  const double inv_batch = 1.0 / static_cast<double>(example_indices.size());
  double total = 0.0;
  std::map<std::string, double> component_sums;
  std::ostringstream provenance;
  bool finite = true;

  for (int64_t index : example_indices) {
    RandomStream rng(MixSeed(config_.seed, static_cast<uint64_t>(epoch),
                             static_cast<uint64_t>(index)));
    TrainExample example = source_->Get(index, config_.segment_seconds, &rng);
    provenance << example.id << ' ';

    std::vector<std::string> events;
    FbankFeature enroll_feature = PrepareEnrollment(example, allow_augmentation, &rng, &events);

    LossResult result;
    if (allow_augmentation && HasAug(Augmentation::kSsaMulti)) {
      result = SsaMultiLoss(*model_, example, config_.gamma, config_.beta, &enroll_feature);
      events.push_back("ssa_multi");
    } else if (allow_augmentation && HasAug(Augmentation::kSsaSingle)) {
      const bool fired = Gate(augment_config_.beta, &rng);
      result = SsaSingleLoss(*model_, example, config_.gamma, fired, &enroll_feature);
      if (fired) events.push_back("ssa_single");
    } else {
      nn::Var emb = model_->EmbedFeature(enroll_feature);
      nn::Var est = model_->ExtractVar(example.mixture, emb);
      nn::Var logits = config_.gamma > 0.0 ? model_->Logits(emb) : nn::Var();
      result = CombinedLossVar(est, example.target, logits, example.speaker_label,
                               config_.gamma);
    }

    if (!std::isfinite(result.value.total)) {
      finite = false;
      record.note = "non-finite loss on example " + example.id;
      break;
    }
    total += result.value.total * inv_batch;
    for (const auto& [k, v] : result.value.components) component_sums[k] += v * inv_batch;
    for (auto& e : events) record.events.push_back(e);

    nn::Backward(nn::MulScalar(result.total, inv_batch));
  }

  if (!finite) {
    record.aborted = true;
    record.note += " | batch: " + provenance.str();
    optimizer_.ZeroGrad();  // parameters stay untouched
    return record;
  }

  optimizer_.Step(record.lr);
  record.loss.total = total;
  record.loss.components = std::move(component_sums);
  return record;
}

Checkpoint Trainer::SnapshotCheckpoint(int64_t epoch) const {
  Checkpoint ck;
  ck.parameters = model_->params().Snapshot();
  ck.epoch = epoch;
  ck.config_hash = config_hash_;
  ck.config_text = config_text_;
  ck.speaker_ids = source_->SpeakerIds();
  return ck;
}

std::vector<Checkpoint> Trainer::Run(const std::function<void(const StepRecord&)>& step_sink) {
  std::vector<Checkpoint> checkpoints;
  int64_t step = 0;
  for (int epoch = 0; epoch < config_.epochs; ++epoch) {
    std::vector<int64_t> order(static_cast<size_t>(source_->Size()));
    std::iota(order.begin(), order.end(), 0);
    RandomStream shuffle_rng(MixSeed(config_.seed, 0x5A17ULL, static_cast<uint64_t>(epoch)));
    for (int64_t i = static_cast<int64_t>(order.size()) - 1; i > 0; --i) {
      std::swap(order[static_cast<size_t>(i)],
                order[static_cast<size_t>(shuffle_rng.UniformInt(0, i))]);
    }
    for (int64_t b = 0; b < steps_per_epoch_; ++b) {
      std::vector<int64_t> batch;
      for (int64_t i = b * config_.batch_size;
           i < std::min<int64_t>((b + 1) * config_.batch_size, source_->Size()); ++i) {
        batch.push_back(order[static_cast<size_t>(i)]);
      }
      StepRecord record = TrainStep(batch, step, epoch);
      if (step_sink) step_sink(record);
      ++step;
    }
    checkpoints.push_back(SnapshotCheckpoint(epoch));
  }
  return checkpoints;
}

}  // namespace tsekit
