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

#include <cstdio>
#include <map>

#include "doctest.h"
#include "test_util.h"
#include "tsekit/dataset.h"
#include "tsekit/manifest.h"
#include "tsekit/objectives.h"

using namespace tsekit;
using tsekit::testing::NoiseSignal;

namespace {
AudioSignal Sig(std::vector<double> v, int rate = kSampleRate) {
  return AudioSignal{std::move(v), rate};
}
}  // namespace

TEST_SUITE_BEGIN("data");

TEST_CASE("simulate_mixture sums elementwise in min mode") {
  auto x = SimulateMixture(Sig({1, 1}), Sig({0, -1}), nullptr);
  REQUIRE(x.length() == 2);
  CHECK(x.samples[0] == 1.0);
  CHECK(x.samples[1] == 0.0);

  AudioSignal n = Sig({0, 0});
  auto y = SimulateMixture(Sig({1, 1, 1}), Sig({1, 1}), &n);
  REQUIRE(y.length() == 2);
  CHECK(y.samples[0] == 2.0);
  CHECK(y.samples[1] == 2.0);
}

TEST_CASE("simulate_mixture rejects bad input") {
  CHECK_THROWS_AS(SimulateMixture(Sig({1}, 16000), Sig({1}, 8000), nullptr), InvalidInput);
  CHECK_THROWS_AS(SimulateMixture(Sig({}), Sig({1}), nullptr), InvalidInput);
}

TEST_CASE("simulate_mixture is linear and min-length") {
  RandomStream rng(3);
  AudioSignal t = NoiseSignal(1000, 1), i = NoiseSignal(900, 2), n = NoiseSignal(950, 3);
  auto x = SimulateMixture(t, i, &n);
  CHECK(x.length() == 900);

  const double a = 3.7;
  AudioSignal ta = t, ia = i, na = n;
  for (auto& v : ta.samples) v *= a;
  for (auto& v : ia.samples) v *= a;
  for (auto& v : na.samples) v *= a;
  auto xa = SimulateMixture(ta, ia, &na);
  for (int64_t k = 0; k < x.length(); ++k) {
    CHECK(xa.samples[static_cast<size_t>(k)] ==
          doctest::Approx(a * x.samples[static_cast<size_t>(k)]).epsilon(1e-12));
  }
}

TEST_CASE("mixture SI-SDR agrees with a direct oracle evaluation") {
  AudioSignal t = NoiseSignal(4000, 11), i = NoiseSignal(4000, 12);
  auto x = SimulateMixture(t, i, nullptr);
  double lib = -SiSdrLoss(t, x);
  double oracle = tsekit::testing::SiSdrOracleDb(t.samples, x.samples);
  CHECK(lib == doctest::Approx(oracle).epsilon(1e-10));
}

TEST_CASE("chunk_segment crops, passes through, and pads") {
  RandomStream rng(5);
  AudioSignal five_s = NoiseSignal(5 * kSampleRate, 1);
  auto c = ChunkSegment(five_s, 3.0, &rng);
  CHECK(c.length() == 48000);
  // the slice appears verbatim somewhere in the input
  bool found = false;
  for (int64_t off = 0; off + c.length() <= five_s.length() && !found; ++off) {
    if (five_s.samples[static_cast<size_t>(off)] == c.samples[0] &&
        five_s.samples[static_cast<size_t>(off + 1)] == c.samples[1]) {
      found = std::equal(c.samples.begin(), c.samples.end(), five_s.samples.begin() + off);
    }
  }
  CHECK(found);

  AudioSignal exact = NoiseSignal(3 * kSampleRate, 2);
  auto e = ChunkSegment(exact, 3.0, &rng);
  CHECK(e.samples == exact.samples);

  AudioSignal one_s = NoiseSignal(kSampleRate, 3);
  auto p = ChunkSegment(one_s, 3.0, &rng);
  REQUIRE(p.length() == 48000);
  CHECK(std::equal(one_s.samples.begin(), one_s.samples.end(), p.samples.begin()));
  for (int64_t k = kSampleRate; k < p.length(); ++k) CHECK(p.samples[static_cast<size_t>(k)] == 0.0);
}

TEST_CASE("sample_enrollment excludes the target and draws uniformly") {
  std::vector<UtteranceRecord> manifest = {
      {"a1", "A", "/tmp/a1.wav", 3.0},
      {"a2", "A", "/tmp/a2.wav", 2.0},
      {"b1", "B", "/tmp/b1.wav", 4.0},
  };
  RandomStream rng(7);
  auto r = SampleEnrollment(manifest, "A", "a1", &rng);
  CHECK(r.utterance_id == "a2");

  manifest.push_back({"a3", "A", "/tmp/a3.wav", 1.0});
  std::map<std::string, int> counts;
  for (int i = 0; i < 10000; ++i) {
    counts[SampleEnrollment(manifest, "A", "a1", &rng).utterance_id]++;
  }
  CHECK(counts["a1"] == 0);
  CHECK(std::abs(counts["a2"] / 10000.0 - 0.5) < 0.05);
  CHECK(std::abs(counts["a3"] / 10000.0 - 0.5) < 0.05);

  CHECK_THROWS_AS(SampleEnrollment(manifest, "B", "b1", &rng), InvalidInput);
}

TEST_CASE("manifest io round trips") {
  std::vector<UtteranceRecord> records = {
      {"u1", "spk1", "/data/u1.wav", 3.25},
      {"u2", "spk2", "/data/u2.wav", 1.5},
  };
  const std::string path = "/tmp/tsekit_test_manifest.tsv";
  WriteUtteranceManifest(path, records);
  auto back = ReadUtteranceManifest(path);
  REQUIRE(back.size() == 2);
  CHECK(back[0].utterance_id == "u1");
  CHECK(back[1].speaker_id == "spk2");
  CHECK(back[1].duration == doctest::Approx(1.5));

  std::vector<MixtureRecord> mixtures = {
      {"m1", "spk1", "/d/m1.wav", "/d/t1.wav", "/d/i1.wav", ""},
      {"m2", "spk2", "/d/m2.wav", "/d/t2.wav", "/d/i2.wav", "/d/n2.wav"},
  };
  const std::string mpath = "/tmp/tsekit_test_mixtures.tsv";
  WriteMixtureManifest(mpath, mixtures);
  auto mback = ReadMixtureManifest(mpath);
  REQUIRE(mback.size() == 2);
  CHECK_FALSE(mback[0].has_noise());
  CHECK(mback[1].noise_path == "/d/n2.wav");

  std::map<std::string, std::string> emap = {{"m1", "u9"}, {"m2", "u3"}};
  const std::string epath = "/tmp/tsekit_test_enroll.tsv";
  WriteEnrollmentMap(epath, emap);
  CHECK(ReadEnrollmentMap(epath) == emap);
  std::remove(path.c_str());
  std::remove(mpath.c_str());
  std::remove(epath.c_str());
}

TEST_CASE("toy corpus enrollments never alias the target utterance") {
  ToyCorpusConfig cfg;
  cfg.num_mixtures = 64;
  RandomStream rng(13);
  auto utts = MakeToyUtterances(cfg, &rng);
  auto mixes = MakeToyMixtures(cfg, utts, &rng);
  REQUIRE(mixes.size() == 64);
  for (const auto& m : mixes) {
    CHECK(m.enrollment_utterance_id != m.target_utterance_id);
    CHECK(m.mixture.length() == m.target.length());
    CHECK(m.mixture.length() == m.interference.length());
    // enrollment shares the speaker by construction
    CHECK(m.enrollment_utterance_id.substr(0, 4) == m.target_utterance_id.substr(0, 4));
  }

  // resampled aliasing check over many draws of the enrollment sampler itself
  std::vector<UtteranceRecord> records;
  for (const auto& u : utts) records.push_back(u.record);
  for (int i = 0; i < 10000; ++i) {
    auto r = SampleEnrollment(records, "spk0", "spk0_utt1", &rng);
    CHECK(r.utterance_id != "spk0_utt1");
    CHECK(r.speaker_id == "spk0");
  }
}

TEST_CASE("in-memory source chunks mixture and target with one offset") {
  ToyCorpusConfig cfg;
  cfg.utterance_seconds = 1.0;
  RandomStream rng(17);
  auto utts = MakeToyUtterances(cfg, &rng);
  auto mixes = MakeToyMixtures(cfg, utts, &rng);
  InMemorySource source(std::move(mixes));
  CHECK(source.NumSpeakers() == 4);

  auto ex = source.Get(0, 0.5, &rng);
  CHECK(ex.mixture.length() == 8000);
  CHECK(ex.target.length() == 8000);
  // mixture minus target must equal the (scaled) interference slice, so the
  // offsets used for the two signals are identical
  const auto& full = source.examples()[0];
  bool aligned = false;
  for (int64_t off = 0; off + 8000 <= full.mixture.length() && !aligned; ++off) {
    if (full.mixture.samples[static_cast<size_t>(off)] == ex.mixture.samples[0]) {
      aligned = std::equal(ex.target.samples.begin(), ex.target.samples.end(),
                           full.target.samples.begin() + off);
    }
  }
  CHECK(aligned);
}

TEST_SUITE_END();
