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

#ifndef TSEKIT_DATASET_H_
#define TSEKIT_DATASET_H_

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tsekit/audio.h"
#include "tsekit/manifest.h"
#include "tsekit/rng.h"

namespace tsekit {

// A simulated two-speaker example. All contained signals share the min-mode
// length and sample rate; the enrollment is a different utterance of the
// target speaker.
struct MixtureExample {
  AudioSignal mixture;
  AudioSignal target;
  AudioSignal interference;
  std::optional<AudioSignal> noise;
  std::string target_speaker_id;
  AudioSignal enrollment;
  std::string mixture_id;
  std::string enrollment_utterance_id;
  std::string target_utterance_id;
};

enum class MixMode { kMin };

// Sample-wise sum after truncating every source to the shortest length.
AudioSignal SimulateMixture(const AudioSignal& target, const AudioSignal& interference,
                            const AudioSignal* noise, MixMode mode = MixMode::kMin);

// Random fixed-length crop; shorter inputs are zero-padded at the tail.
AudioSignal ChunkSegment(const AudioSignal& signal, double seconds, RandomStream* rng);

// Uniform choice among the speaker's other utterances. Requires at least two
// utterances for the speaker.
UtteranceRecord SampleEnrollment(const std::vector<UtteranceRecord>& manifest,
                                 const std::string& speaker_id,
                                 const std::string& exclude_utterance, RandomStream* rng);

// One training item as the trainer consumes it: chunked mixture/target plus
// the full-length enrollment utterance.
struct TrainExample {
  std::string id;
  AudioSignal mixture;
  AudioSignal target;
  AudioSignal enrollment;
  int64_t speaker_label = 0;
  std::string speaker_id;
};

// Uniform access to training examples; implementations are pure given the rng
// so parallel data workers with per-example streams stay reproducible.
class ExampleSource {
 public:
  virtual ~ExampleSource() = default;
  virtual int64_t Size() const = 0;
  virtual int64_t NumSpeakers() const = 0;
  virtual std::vector<std::string> SpeakerIds() const = 0;
  virtual TrainExample Get(int64_t index, double segment_seconds, RandomStream* rng) const = 0;
};

// Fully in-memory source over prebuilt examples (toy experiments, tests).
class InMemorySource : public ExampleSource {
 public:
  explicit InMemorySource(std::vector<MixtureExample> examples);
  int64_t Size() const override { return static_cast<int64_t>(examples_.size()); }
  int64_t NumSpeakers() const override { return static_cast<int64_t>(speakers_.size()); }
  std::vector<std::string> SpeakerIds() const override { return speakers_; }
  TrainExample Get(int64_t index, double segment_seconds, RandomStream* rng) const override;
  const std::vector<MixtureExample>& examples() const { return examples_; }

 private:
  std::vector<MixtureExample> examples_;
  std::vector<std::string> speakers_;
  std::map<std::string, int64_t> label_of_;
};

// Disk-backed source: mixture manifest rows plus an utterance manifest that
// serves as the enrollment pool. Enrollment is re-sampled on every access.
class ManifestSource : public ExampleSource {
 public:
  ManifestSource(std::vector<MixtureRecord> mixtures, std::vector<UtteranceRecord> utterances);
  int64_t Size() const override { return static_cast<int64_t>(mixtures_.size()); }
  int64_t NumSpeakers() const override { return static_cast<int64_t>(speakers_.size()); }
  std::vector<std::string> SpeakerIds() const override { return speakers_; }
  TrainExample Get(int64_t index, double segment_seconds, RandomStream* rng) const override;

 private:
  std::vector<MixtureRecord> mixtures_;
  std::vector<UtteranceRecord> utterances_;
  std::vector<std::string> speakers_;
  std::map<std::string, int64_t> label_of_;
};

// --- synthetic desk-scale corpus ---
// Speakers are separated by spectral envelope: each one's harmonics live in a
// distinct frequency band, which makes the toy task learnable by a small model.

struct ToyCorpusConfig {
  int num_speakers = 4;
  int utterances_per_speaker = 4;
  double utterance_seconds = 0.6;
  int num_mixtures = 8;
  // Synthetic-only loudness jitter: target-to-interference ratio, dB.
  double tir_low_db = -5.0;
  double tir_high_db = 5.0;
};

struct ToyUtterance {
  UtteranceRecord record;  // path empty for in-memory corpora
  AudioSignal audio;
};

std::vector<ToyUtterance> MakeToyUtterances(const ToyCorpusConfig& config, RandomStream* rng);

// Builds num_mixtures examples over distinct speaker pairs, applying the
// synthetic-mixing TIR jitter to the interference before summation.
std::vector<MixtureExample> MakeToyMixtures(const ToyCorpusConfig& config,
                                            const std::vector<ToyUtterance>& utterances,
                                            RandomStream* rng);

}  // namespace tsekit

#endif  // TSEKIT_DATASET_H_
