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

#include <cmath>
#include <complex>

#include "doctest.h"
#include "test_util.h"
#include "tsekit/fbank.h"
#include "tsekit/fft.h"
#include "tsekit/stft.h"

using namespace tsekit;
using tsekit::testing::NoiseSignal;
using tsekit::testing::SpeechLikeChirp;
using tsekit::testing::Tone;

namespace {

double ReconstructionSnrDb(const std::vector<double>& ref, const std::vector<double>& est) {
  REQUIRE(ref.size() == est.size());
  double sig = 0.0, err = 0.0;
  for (size_t i = 0; i < ref.size(); ++i) {
    sig += ref[i] * ref[i];
    double d = ref[i] - est[i];
    err += d * d;
  }
  if (err == 0.0) return 300.0;
  return 10.0 * std::log10(sig / err);
}

}  // namespace

TEST_SUITE_BEGIN("features");

TEST_CASE("fft round trip and known transform") {
  // impulse -> flat spectrum
  std::vector<double> x(8, 0.0);
  x[0] = 1.0;
  auto bins = Rfft(x);
  for (const auto& b : bins) {
    CHECK(b.real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(b.imag() == doctest::Approx(0.0).epsilon(1e-12));
  }
  RandomStream rng(3);
  std::vector<double> y = tsekit::testing::WhiteNoise(256, &rng);
  auto back = Irfft(Rfft(y), 256);
  CHECK(ReconstructionSnrDb(y, back) > 200.0);
}

TEST_CASE("stft of zero signal is zero and linearity holds") {
  StftConfig cfg;
  StftTransform stft(cfg);
  AudioSignal zero{std::vector<double>(16000, 0.0), kSampleRate};
  auto spec = stft.Forward(zero);
  for (const auto& v : spec.bins) CHECK(std::abs(v) == 0.0);

  AudioSignal x = NoiseSignal(8000, 11);
  auto sx = stft.Forward(x);
  AudioSignal x2 = x;
  for (auto& v : x2.samples) v *= 2.5;
  auto sx2 = stft.Forward(x2);
  double worst = 0.0;
  for (size_t i = 0; i < sx.bins.size(); ++i) {
    worst = std::max(worst, std::abs(sx2.bins[i] - 2.5 * sx.bins[i]));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("pure 1 kHz tone peaks at the nearest bin in every frame") {
  StftConfig cfg;  // fft 512 at 16 kHz -> 31.25 Hz per bin, 1 kHz = bin 32
  StftTransform stft(cfg);
  auto spec = stft.Forward(Tone(1000.0, 1.0));
  const int64_t expected_bin = 32;
  for (int64_t t = 1; t + 1 < spec.num_frames; ++t) {  // skip edge frames (reflect pad)
    int64_t arg = 0;
    double best = -1.0;
    for (int64_t f = 0; f < spec.num_bins; ++f) {
      double mag = std::abs(spec.at(f, t));
      if (mag > best) {
        best = mag;
        arg = f;
      }
    }
    CHECK(arg == expected_bin);
  }
}

TEST_CASE("istft reconstructs the input") {
  StftConfig cfg;
  StftTransform stft(cfg);

  SUBCASE("white noise 3 s, SNR >= 60 dB") {
    AudioSignal x = NoiseSignal(3 * kSampleRate, 21);
    auto rec = stft.Inverse(stft.Forward(x), x.length());
    CHECK(ReconstructionSnrDb(x.samples, rec.samples) >= 60.0);
    // relative error <= 1e-6 overall
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < x.samples.size(); ++i) {
      num += (x.samples[i] - rec.samples[i]) * (x.samples[i] - rec.samples[i]);
      den += x.samples[i] * x.samples[i];
    }
    CHECK(std::sqrt(num / den) <= 1e-6);
  }
  SUBCASE("speech-like chirp") {
    AudioSignal x = SpeechLikeChirp(3.0);
    auto rec = stft.Inverse(stft.Forward(x), x.length());
    CHECK(ReconstructionSnrDb(x.samples, rec.samples) >= 60.0);
  }
  SUBCASE("odd lengths trim exactly") {
    for (int64_t n : {701, 16000, 16001, 75200}) {
      AudioSignal x = NoiseSignal(n, 5);
      auto rec = stft.Inverse(stft.Forward(x), n);
      CHECK(rec.length() == n);
      CHECK(ReconstructionSnrDb(x.samples, rec.samples) >= 60.0);
    }
  }
}

TEST_CASE("all-zero spectrogram synthesizes silence") {
  StftConfig cfg;
  StftTransform stft(cfg);
  auto spec = stft.Forward(NoiseSignal(16000, 2));
  for (auto& v : spec.bins) v = {0.0, 0.0};
  auto rec = stft.Inverse(spec, 16000);
  for (double v : rec.samples) CHECK(v == 0.0);
}

TEST_CASE("stft rejects bad input") {
  StftConfig cfg;
  StftTransform stft(cfg);
  AudioSignal tiny{std::vector<double>(100, 0.1), kSampleRate};
  CHECK_THROWS_AS(stft.Forward(tiny), InvalidInput);

  auto spec = stft.Forward(NoiseSignal(16000, 2));
  spec.frame_shift = 64;  // inconsistent params
  CHECK_THROWS_AS(stft.Inverse(spec, 16000), InvalidInput);
  StftConfig other;
  other.fft_size = 256;
  other.window_length = 256;
  StftTransform stft2(other);
  auto spec2 = stft.Forward(NoiseSignal(16000, 2));
  CHECK_THROWS_AS(stft2.Inverse(spec2, 16000), InvalidInput);
}

TEST_CASE("stft energy ratio is stable across inputs") {
  StftConfig cfg;
  StftTransform stft(cfg);
  std::vector<double> ratios;
  for (uint64_t seed : {1u, 2u, 3u, 4u}) {
    AudioSignal x = NoiseSignal(2 * kSampleRate, seed);
    auto spec = stft.Forward(x);
    double se = 0.0;
    for (const auto& v : spec.bins) {
      double w = std::norm(v);
      se += w;
    }
    double xe = 0.0;
    for (double v : x.samples) xe += v * v;
    ratios.push_back(se / xe);
  }
  for (size_t i = 1; i < ratios.size(); ++i) {
    CHECK(ratios[i] == doctest::Approx(ratios[0]).epsilon(0.01));
  }
}

TEST_CASE("differentiable synthesis agrees with the fft-based inverse") {
  StftConfig cfg;
  cfg.fft_size = 64;
  cfg.window_length = 64;
  cfg.hop = 16;
  StftTransform stft(cfg);
  AudioSignal x = NoiseSignal(640, 9);
  auto spec = stft.Forward(x);
  // perturb the spectrogram so this is not just a round trip
  RandomStream rng(10);
  for (auto& v : spec.bins) v *= (0.5 + rng.Uniform());

  auto plain = stft.Inverse(spec, x.length());

  nn::Tensor re({spec.num_bins, spec.num_frames}), im({spec.num_bins, spec.num_frames});
  for (int64_t f = 0; f < spec.num_bins; ++f) {
    for (int64_t t = 0; t < spec.num_frames; ++t) {
      re.at(f, t) = spec.at(f, t).real();
      im.at(f, t) = spec.at(f, t).imag();
    }
  }
  nn::Var out = stft.InverseVar(nn::Constant(re), nn::Constant(im), x.length());
  REQUIRE(out.numel() == x.length());
  double worst = 0.0;
  for (int64_t i = 0; i < out.numel(); ++i) {
    worst = std::max(worst, std::abs(out.value()[i] - plain.samples[static_cast<size_t>(i)]));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("differentiable synthesis gradient matches finite differences") {
  StftConfig cfg;
  cfg.fft_size = 16;
  cfg.window_length = 16;
  cfg.hop = 8;
  StftTransform stft(cfg);
  RandomStream rng(12);
  nn::ParameterStore store;
  nn::Var re = store.Create("re", nn::Tensor({9, 6}));
  nn::Var im = store.Create("im", nn::Tensor({9, 6}));
  for (int64_t i = 0; i < re.numel(); ++i) re.mutable_value()[i] = rng.Normal();
  for (int64_t i = 0; i < im.numel(); ++i) im.mutable_value()[i] = rng.Normal();
  auto loss = [&]() { return nn::Sum(nn::Square(stft.InverseVar(re, im, 32))); };
  CHECK(tsekit::testing::MaxGradCheckError(&store, loss) < 1e-6);
}

TEST_CASE("fbank frame count matches the closed-form formula") {
  FbankConfig cfg;
  FbankExtractor fbank(cfg);
  // 1 s at 16 kHz, 25 ms window / 10 ms hop -> 98 frames
  CHECK(fbank.NumFrames(16000) == 98);
  auto feat = fbank.Compute(NoiseSignal(16000, 3));
  CHECK(feat.num_frames == 98);
  CHECK(feat.num_mels == 80);
  CHECK(feat.all_finite());
}

TEST_CASE("fbank of digital silence is the log floor everywhere") {
  FbankConfig cfg;
  FbankExtractor fbank(cfg);
  AudioSignal silence{std::vector<double>(16000, 0.0), kSampleRate};
  auto feat = fbank.Compute(silence);
  const double expect = std::log(cfg.log_floor);
  for (double v : feat.frames) CHECK(v == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("doubling amplitude shifts every log-mel energy by log 4") {
  FbankConfig cfg;
  FbankExtractor fbank(cfg);
  AudioSignal x = NoiseSignal(16000, 4, 0.05);
  AudioSignal x2 = x;
  for (auto& v : x2.samples) v *= 2.0;
  auto f1 = fbank.Compute(x);
  auto f2 = fbank.Compute(x2);
  const double ln4 = std::log(4.0);
  for (size_t i = 0; i < f1.frames.size(); ++i) {
    CHECK(f2.frames[i] - f1.frames[i] == doctest::Approx(ln4).epsilon(1e-9));
  }
}

TEST_CASE("fbank is shift-equivariant at hop granularity") {
  FbankConfig cfg;
  FbankExtractor fbank(cfg);
  AudioSignal x = NoiseSignal(16000 + 160, 7);
  AudioSignal shifted;
  shifted.sample_rate = x.sample_rate;
  shifted.samples.assign(x.samples.begin() + 160, x.samples.end());
  auto f1 = fbank.Compute(x);
  auto f2 = fbank.Compute(shifted);
  for (int64_t t = 0; t < f2.num_frames; ++t) {
    for (int64_t m = 0; m < f2.num_mels; ++m) {
      CHECK(std::abs(f1.at(t + 1, m) - f2.at(t, m)) < 1e-6);
    }
  }
}

TEST_CASE("fbank rejects too-short input, mean norm zeroes the mean") {
  FbankConfig cfg;
  FbankExtractor fbank(cfg);
  AudioSignal tiny{std::vector<double>(100, 0.1), kSampleRate};
  CHECK_THROWS_AS(fbank.Compute(tiny), InvalidInput);

  auto feat = fbank.Compute(NoiseSignal(8000, 8));
  ApplyMeanNorm(&feat);
  for (int64_t m = 0; m < feat.num_mels; ++m) {
    double mean = 0.0;
    for (int64_t t = 0; t < feat.num_frames; ++t) mean += feat.at(t, m);
    CHECK(std::abs(mean / feat.num_frames) < 1e-9);
  }
}

TEST_SUITE_END();
