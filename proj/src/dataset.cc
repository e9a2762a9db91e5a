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

#include "tsekit/dataset.h"

#include <algorithm>
#include <cmath>
#include <set>

namespace tsekit {

namespace {
constexpr double kPi = 3.141592653589793238462643383279;

std::vector<std::string> CollectSpeakers(const std::vector<std::string>& ids) {
  std::set<std::string> uniq(ids.begin(), ids.end());
  return {uniq.begin(), uniq.end()};
}
}  // namespace

AudioSignal SimulateMixture(const AudioSignal& target, const AudioSignal& interference,
                            const AudioSignal* noise, MixMode mode) {
  TK_REQUIRE(mode == MixMode::kMin, "only min-mode mixing is supported");
  target.Validate();
  interference.Validate();
  TK_REQUIRE(target.sample_rate == interference.sample_rate,
             "mixture sources must share a sample rate");
  int64_t len = std::min(target.length(), interference.length());
  if (noise != nullptr) {
    noise->Validate();
    TK_REQUIRE(noise->sample_rate == target.sample_rate,
               "noise sample rate differs from the sources");
    len = std::min(len, noise->length());
  }
  AudioSignal out;
  out.sample_rate = target.sample_rate;
  out.samples.resize(static_cast<size_t>(len));
  for (int64_t i = 0; i < len; ++i) {
    double v = target.samples[static_cast<size_t>(i)] + interference.samples[static_cast<size_t>(i)];
    if (noise != nullptr) v += noise->samples[static_cast<size_t>(i)];
    out.samples[static_cast<size_t>(i)] = v;
  }
  return out;
}

AudioSignal ChunkSegment(const AudioSignal& signal, double seconds, RandomStream* rng) {
  signal.Validate();
  TK_REQUIRE(seconds > 0.0, "chunk length must be positive");
  const int64_t want = static_cast<int64_t>(std::llround(seconds * signal.sample_rate));
  AudioSignal out;
  out.sample_rate = signal.sample_rate;
  out.samples.assign(static_cast<size_t>(want), 0.0);
  if (signal.length() <= want) {
    std::copy(signal.samples.begin(), signal.samples.end(), out.samples.begin());
    return out;
  }
  const int64_t max_start = signal.length() - want;
  const int64_t start = rng->UniformInt(0, max_start);
  std::copy_n(signal.samples.begin() + start, want, out.samples.begin());
  return out;
}

UtteranceRecord SampleEnrollment(const std::vector<UtteranceRecord>& manifest,
                                 const std::string& speaker_id,
                                 const std::string& exclude_utterance, RandomStream* rng) {
  std::vector<const UtteranceRecord*> pool;
  int64_t speaker_total = 0;
  for (const auto& r : manifest) {
    if (r.speaker_id != speaker_id) continue;
    ++speaker_total;
    if (r.utterance_id != exclude_utterance) pool.push_back(&r);
  }
  TK_REQUIRE(speaker_total >= 2,
             "speaker " + speaker_id + " needs at least 2 utterances to sample enrollment "
             "(cannot exclude the target utterance otherwise)");
  TK_REQUIRE(!pool.empty(), "no enrollment candidate left for speaker " + speaker_id);
  const int64_t pick = rng->UniformInt(0, static_cast<int64_t>(pool.size()) - 1);
  return *pool[static_cast<size_t>(pick)];
}

// --- InMemorySource ---

InMemorySource::InMemorySource(std::vector<MixtureExample> examples)
    : examples_(std::move(examples)) {
  TK_REQUIRE(!examples_.empty(), "empty example list");
  std::vector<std::string> ids;
  for (const auto& e : examples_) ids.push_back(e.target_speaker_id);
  speakers_ = CollectSpeakers(ids);
  for (size_t i = 0; i < speakers_.size(); ++i) label_of_[speakers_[i]] = static_cast<int64_t>(i);
}

TrainExample InMemorySource::Get(int64_t index, double segment_seconds,
                                 RandomStream* rng) const {
  TK_REQUIRE(index >= 0 && index < Size(), "example index out of range");
  const MixtureExample& e = examples_[static_cast<size_t>(index)];
  TrainExample out;
  out.id = e.mixture_id;
  out.speaker_id = e.target_speaker_id;
  out.speaker_label = label_of_.at(e.target_speaker_id);
  out.enrollment = e.enrollment;
  if (segment_seconds > 0.0 &&
      e.mixture.length() > static_cast<int64_t>(std::llround(segment_seconds * e.mixture.sample_rate))) {
    // one offset for both signals so they stay aligned
    const int64_t want = static_cast<int64_t>(std::llround(segment_seconds * e.mixture.sample_rate));
    const int64_t start = rng->UniformInt(0, e.mixture.length() - want);
    out.mixture.sample_rate = e.mixture.sample_rate;
    out.target.sample_rate = e.target.sample_rate;
    out.mixture.samples.assign(e.mixture.samples.begin() + start,
                               e.mixture.samples.begin() + start + want);
    out.target.samples.assign(e.target.samples.begin() + start,
                              e.target.samples.begin() + start + want);
  } else {
    out.mixture = e.mixture;
    out.target = e.target;
    if (segment_seconds > 0.0) {
      const int64_t want = static_cast<int64_t>(std::llround(segment_seconds * e.mixture.sample_rate));
      out.mixture.samples.resize(static_cast<size_t>(want), 0.0);
      out.target.samples.resize(static_cast<size_t>(want), 0.0);
    }
  }
  return out;
}

// --- ManifestSource ---

ManifestSource::ManifestSource(std::vector<MixtureRecord> mixtures,
                               std::vector<UtteranceRecord> utterances)
    : mixtures_(std::move(mixtures)), utterances_(std::move(utterances)) {
  TK_REQUIRE(!mixtures_.empty(), "empty mixture manifest");
  std::vector<std::string> ids;
  for (const auto& m : mixtures_) ids.push_back(m.target_speaker_id);
  speakers_ = CollectSpeakers(ids);
  for (size_t i = 0; i < speakers_.size(); ++i) label_of_[speakers_[i]] = static_cast<int64_t>(i);
}

TrainExample ManifestSource::Get(int64_t index, double segment_seconds,
                                 RandomStream* rng) const {
  TK_REQUIRE(index >= 0 && index < Size(), "example index out of range");
  const MixtureRecord& rec = mixtures_[static_cast<size_t>(index)];
  AudioSignal mixture = ReadWav(rec.mixture_path);
  AudioSignal target = ReadWav(rec.target_path);
  TK_REQUIRE(mixture.length() == target.length(),
             "mixture/target length mismatch for " + rec.mixture_id);

  TrainExample out;
  out.id = rec.mixture_id;
  out.speaker_id = rec.target_speaker_id;
  out.speaker_label = label_of_.at(rec.target_speaker_id);

  if (segment_seconds > 0.0) {
    const int64_t want = static_cast<int64_t>(std::llround(segment_seconds * mixture.sample_rate));
    if (mixture.length() > want) {
      const int64_t start = rng->UniformInt(0, mixture.length() - want);
      out.mixture.sample_rate = mixture.sample_rate;
      out.target.sample_rate = target.sample_rate;
      out.mixture.samples.assign(mixture.samples.begin() + start,
                                 mixture.samples.begin() + start + want);
      out.target.samples.assign(target.samples.begin() + start,
                                target.samples.begin() + start + want);
    } else {
      mixture.samples.resize(static_cast<size_t>(want), 0.0);
      target.samples.resize(static_cast<size_t>(want), 0.0);
      out.mixture = std::move(mixture);
      out.target = std::move(target);
    }
  } else {
    out.mixture = std::move(mixture);
    out.target = std::move(target);
  }

  // The target utterance itself is not in the enrollment pool: mixture ids
  // carry the source utterance id as "<target_utt>:<interference_utt>".
  std::string target_utt = rec.mixture_id;
  auto colon = target_utt.find(':');
  if (colon != std::string::npos) target_utt = target_utt.substr(0, colon);
  UtteranceRecord enroll =
      SampleEnrollment(utterances_, rec.target_speaker_id, target_utt, rng);
  out.enrollment = ReadWav(enroll.path);
  return out;
}

// --- synthetic corpus ---

std::vector<ToyUtterance> MakeToyUtterances(const ToyCorpusConfig& config, RandomStream* rng) {
  TK_REQUIRE(config.num_speakers >= 2, "toy corpus needs at least two speakers");
  TK_REQUIRE(config.utterances_per_speaker >= 2,
             "toy corpus needs >= 2 utterances per speaker for enrollment sampling");
  std::vector<ToyUtterance> out;
  const int64_t n = static_cast<int64_t>(config.utterance_seconds * kSampleRate);
  for (int s = 0; s < config.num_speakers; ++s) {
    // distinct, non-overlapping band per speaker
    const double band_lo = 300.0 + 1200.0 * s;
    const double band_hi = band_lo + 800.0;
    for (int u = 0; u < config.utterances_per_speaker; ++u) {
      AudioSignal sig;
      sig.sample_rate = kSampleRate;
      sig.samples.assign(static_cast<size_t>(n), 0.0);
      const int num_partials = 5;
      for (int p = 0; p < num_partials; ++p) {
        double freq = rng->Uniform(band_lo, band_hi);
        double phase = rng->Uniform(0.0, 2.0 * kPi);
        double amp = rng->Uniform(0.4, 1.0);
        double am_rate = rng->Uniform(1.5, 5.0);
        double am_phase = rng->Uniform(0.0, 2.0 * kPi);
        for (int64_t i = 0; i < n; ++i) {
          double t = static_cast<double>(i) / kSampleRate;
          double am = 0.6 + 0.4 * std::sin(2.0 * kPi * am_rate * t + am_phase);
          sig.samples[static_cast<size_t>(i)] +=
              amp * am * std::sin(2.0 * kPi * freq * t + phase);
        }
      }
      double rms = SignalRms(sig.samples);
      for (auto& v : sig.samples) v *= 0.08 / rms;
      ToyUtterance tu;
      tu.record.utterance_id = "spk" + std::to_string(s) + "_utt" + std::to_string(u);
      tu.record.speaker_id = "spk" + std::to_string(s);
      tu.record.duration = config.utterance_seconds;
      tu.audio = std::move(sig);
      out.push_back(std::move(tu));
    }
  }
  return out;
}

std::vector<MixtureExample> MakeToyMixtures(const ToyCorpusConfig& config,
                                            const std::vector<ToyUtterance>& utterances,
                                            RandomStream* rng) {
  std::vector<UtteranceRecord> records;
  for (const auto& u : utterances) records.push_back(u.record);
  auto find_audio = [&](const std::string& utt_id) -> const AudioSignal& {
    for (const auto& u : utterances) {
      if (u.record.utterance_id == utt_id) return u.audio;
    }
    throw RuntimeFailure("unknown toy utterance: " + utt_id);
  };

  std::vector<MixtureExample> out;
  for (int m = 0; m < config.num_mixtures; ++m) {
    int target_spk = m % config.num_speakers;
    int interf_spk = (target_spk + 1 + static_cast<int>(rng->UniformInt(0, config.num_speakers - 2))) %
                     config.num_speakers;
    int target_utt = static_cast<int>(rng->UniformInt(0, config.utterances_per_speaker - 1));
    int interf_utt = static_cast<int>(rng->UniformInt(0, config.utterances_per_speaker - 1));
    std::string target_id = "spk" + std::to_string(target_spk) + "_utt" + std::to_string(target_utt);
    std::string interf_id = "spk" + std::to_string(interf_spk) + "_utt" + std::to_string(interf_utt);

    MixtureExample ex;
    ex.target = find_audio(target_id);
    ex.interference = find_audio(interf_id);
    // synthetic-only target-to-interference jitter
    const double tir_db = rng->Uniform(config.tir_low_db, config.tir_high_db);
    const double gain = std::pow(10.0, -tir_db / 20.0);
    for (auto& v : ex.interference.samples) v *= gain;
    ex.mixture = SimulateMixture(ex.target, ex.interference, nullptr);
    ex.target_speaker_id = "spk" + std::to_string(target_spk);
    ex.target_utterance_id = target_id;
    UtteranceRecord enroll = SampleEnrollment(records, ex.target_speaker_id, target_id, rng);
    ex.enrollment = find_audio(enroll.utterance_id);
    ex.enrollment_utterance_id = enroll.utterance_id;
    ex.mixture_id = target_id + ":" + interf_id + "#" + std::to_string(m);
    out.push_back(std::move(ex));
  }
  return out;
}

}  // namespace tsekit
