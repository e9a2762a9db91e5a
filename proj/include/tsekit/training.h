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

#ifndef TSEKIT_TRAINING_H_
#define TSEKIT_TRAINING_H_

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tsekit/augment.h"
#include "tsekit/checkpoint.h"
#include "tsekit/dataset.h"
#include "tsekit/objectives.h"

namespace tsekit {

enum class Augmentation { kNoise, kReverb, kSpecAugment, kSsaSingle, kSsaMulti };

std::string AugmentationName(Augmentation a);
Augmentation AugmentationFromName(const std::string& name);

struct TrainConfig {
  int epochs = 100;
  int batch_size = 4;  // unstated upstream; exposed in config
  double segment_seconds = 3.0;
  double initial_lr = 1e-3;
  double final_lr = 2.5e-5;
  double beta = 0.6;   // augmentation gate probability / SSA-multi loss weight
  double gamma = 0.1;  // CE weight; forced to 0 when the encoder is frozen
  bool frozen_encoder = false;
  std::vector<Augmentation> augmentations;
  // curriculum: augmentation forced off for the first plain_epochs epochs
  std::optional<std::pair<int, int>> curriculum;  // (plain_epochs, augmented_epochs)
  uint64_t seed = 0;
  nn::AdamConfig adam;

  void Validate() const;
};

// Exponential interpolation from initial_lr at iter 0 to final_lr at max_iter.
double LrSchedule(int64_t current_iter, int64_t max_iter, double initial_lr, double final_lr);

struct StepRecord {
  int64_t step = 0;
  int64_t epoch = 0;
  double lr = 0.0;
  LossValue loss;
  std::vector<std::string> events;  // augmentations that actually fired
  bool aborted = false;             // non-finite loss; parameters untouched
  std::string note;                 // batch provenance on abort
};

// serialized one line per step: step, epoch, lr, loss components, events
std::string StepRecordHeader();
std::string FormatStepRecord(const StepRecord& record);

class Trainer {
 public:
  Trainer(TseModel* model, const TrainConfig& config, const AugmentConfig& augment_config,
          const ExampleSource* source, const NoiseSource* noise_source,
          const RirGenerator* rir_generator, std::string config_hash = "",
          std::string config_text = "");

  // One optimizer step over a batch of example indices.
  StepRecord TrainStep(const std::vector<int64_t>& example_indices, int64_t step_index,
                       int64_t epoch);

  // Full protocol: per-epoch shuffling, curriculum gating, one checkpoint per
  // epoch. step_sink (optional) receives every StepRecord.
  std::vector<Checkpoint> Run(const std::function<void(const StepRecord&)>& step_sink = {});

  Checkpoint SnapshotCheckpoint(int64_t epoch) const;
  int64_t max_iter() const { return max_iter_; }
  int64_t steps_per_epoch() const { return steps_per_epoch_; }

 private:
  // Applies the waveform/feature augmentation policy to one example.
  // Returns the (possibly augmented) enrollment feature and logs events.
  FbankFeature PrepareEnrollment(const TrainExample& example, bool allow_augmentation,
                                 RandomStream* rng, std::vector<std::string>* events) const;

  bool HasAug(Augmentation a) const;

  TseModel* model_;
  TrainConfig config_;
  AugmentConfig augment_config_;
  const ExampleSource* source_;
  const NoiseSource* noise_source_;
  const RirGenerator* rir_generator_;
  std::string config_hash_;
  std::string config_text_;
  nn::AdamOptimizer optimizer_;
  int64_t steps_per_epoch_ = 0;
  int64_t max_iter_ = 0;
};

}  // namespace tsekit

#endif  // TSEKIT_TRAINING_H_
