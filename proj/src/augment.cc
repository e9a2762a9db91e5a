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

#include "tsekit/augment.h"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "tsekit/fft.h"

namespace tsekit {

namespace {
constexpr double kSpeedOfSound = 343.0;  // m/s
constexpr double kPi = 3.141592653589793238462643383279;
// amplitude decay rate: 60 dB of energy per T60 -> exp(-6.9078 t / T60)
constexpr double kDecayRate = 6.907755278982137;

double Distance(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  double s = 0.0;
  for (int i = 0; i < 3; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

// Windowed-sinc fractional-delay placement of an impulse.
void PlaceTap(std::vector<double>* taps, double delay_samples, double amplitude) {
  constexpr int kHalf = 4;
  const int64_t center = static_cast<int64_t>(std::floor(delay_samples));
  for (int64_t j = center - kHalf; j <= center + kHalf + 1; ++j) {
    if (j < 0 || j >= static_cast<int64_t>(taps->size())) continue;
    double t = static_cast<double>(j) - delay_samples;
    double sinc = t == 0.0 ? 1.0 : std::sin(kPi * t) / (kPi * t);
    double win = 0.5 + 0.5 * std::cos(kPi * t / (kHalf + 1.5));
    (*taps)[static_cast<size_t>(j)] += amplitude * sinc * win;
  }
}
}  // namespace

void AugmentConfig::Validate() const {
  TK_REQUIRE(beta >= 0.0 && beta <= 1.0, "beta must be a probability");
  TK_REQUIRE(snr_low_db <= snr_high_db, "snr range inverted");
  TK_REQUIRE(t60_low_s > 0.0 && t60_low_s <= t60_high_s, "t60 range invalid");
  for (int i = 0; i < 3; ++i) {
    TK_REQUIRE(room_min[i] > 0.0, "room dimensions must be positive");
    TK_REQUIRE(room_min[i] <= room_max[i], "room range inverted");
  }
  TK_REQUIRE(time_mask_bound >= 1 && freq_mask_bound >= 1, "mask bounds must be >= 1");
}

bool Gate(double beta, RandomStream* rng) {
  TK_REQUIRE(beta >= 0.0 && beta <= 1.0, "beta must be a probability");
  return rng->Uniform() < beta;
}

AudioSignal MixNoise(const AudioSignal& c, const AudioSignal& noise, double snr_db) {
  c.Validate();
  noise.Validate();
  TK_REQUIRE(c.sample_rate == noise.sample_rate, "noise sample rate mismatch");
  TK_REQUIRE(std::isfinite(snr_db), "snr must be finite");

  const double c_rms = SignalRms(c.samples);
  if (c_rms == 0.0) {
    std::cerr << "[warn] MixNoise: input is digitally silent, SNR undefined; "
                 "returning it unchanged\n";
    return c;
  }

  // loop the noise if it is shorter than the carrier
  std::vector<double> seg(c.samples.size());
  for (size_t i = 0; i < seg.size(); ++i) seg[i] = noise.samples[i % noise.samples.size()];

  const double n_rms = SignalRms(seg);
  TK_REQUIRE(n_rms > 0.0, "noise segment is digitally silent");
  const double norm = c_rms / n_rms;
  const double alpha = std::pow(10.0, -snr_db / 20.0);

  AudioSignal out;
  out.sample_rate = c.sample_rate;
  out.samples.resize(seg.size());
  for (size_t i = 0; i < seg.size(); ++i) {
    out.samples[i] = c.samples[i] + alpha * norm * seg[i];
  }
  return out;
}

RirFilter RenderRir(const std::array<double, 3>& room, const std::array<double, 3>& source,
                    const std::array<double, 3>& mic, double t60, int sample_rate,
                    RandomStream* rng) {
  for (int i = 0; i < 3; ++i) {
    TK_REQUIRE(room[i] > 0.0, "degenerate room dimension");
    TK_REQUIRE(source[i] > 0.0 && source[i] < room[i], "source outside the room");
    TK_REQUIRE(mic[i] > 0.0 && mic[i] < room[i], "mic outside the room");
  }
  TK_REQUIRE(t60 > 0.0, "t60 must be positive");

  const double fs = static_cast<double>(sample_rate);
  const double direct_dist = std::max(Distance(source, mic), 0.1);
  const double direct_delay = direct_dist / kSpeedOfSound * fs;
  const int64_t direct_tap = static_cast<int64_t>(std::llround(direct_delay));
  const int64_t tail_len = static_cast<int64_t>(std::ceil(1.3 * t60 * fs));
  const int64_t total_len = direct_tap + tail_len + 64;

  RirFilter h;
  h.sample_rate = sample_rate;
  h.t60 = t60;
  h.room = room;
  h.source_pos = source;
  h.mic_pos = mic;
  h.taps.assign(static_cast<size_t>(total_len), 0.0);

  const double direct_amp = 1.0 / (4.0 * kPi * direct_dist);
  // direct path on an integer tap so nothing precedes it
  h.taps[static_cast<size_t>(direct_tap)] = direct_amp;

  // Eyring absorption for the sampled T60; bounds the reflection coefficient.
  const double volume = room[0] * room[1] * room[2];
  const double surface =
      2.0 * (room[0] * room[1] + room[0] * room[2] + room[1] * room[2]);
  double absorption = 1.0 - std::exp(-0.161 * volume / (surface * t60));
  absorption = std::min(absorption, 0.9999);
  const double reflection = std::sqrt(1.0 - absorption);

  // first-order image sources: one wall flip per axis
  double first_reflection_delay = 2.0 * direct_delay + 8.0;
  for (int axis = 0; axis < 3; ++axis) {
    for (int side = 0; side < 2; ++side) {
      std::array<double, 3> img = source;
      img[axis] = side == 0 ? -source[axis] : 2.0 * room[axis] - source[axis];
      const double d = Distance(img, mic);
      const double delay = d / kSpeedOfSound * fs;
      first_reflection_delay = std::min(first_reflection_delay, delay);
      const double envelope =
          std::exp(-kDecayRate * std::max(0.0, delay - direct_delay) / (t60 * fs));
      PlaceTap(&h.taps, delay, reflection / (4.0 * kPi * d) * envelope);
    }
  }

  // Dense stochastic late field from the first reflection onward. The
  // amplitude envelope pins the 60 dB decay to the target T60; total tail
  // energy is balanced against the direct path at a plausible ratio.
  const double drr_factor = 2.0;  // reverberant-to-direct energy ratio
  const double tail_start = std::max(first_reflection_delay, direct_delay + 1.0);
  const double tail_amp =
      direct_amp * std::sqrt(2.0 * kDecayRate * drr_factor / (fs * t60));
  for (int64_t i = static_cast<int64_t>(tail_start) + 1; i < total_len; ++i) {
    const double dt = (static_cast<double>(i) - direct_delay) / fs;
    const double env = std::exp(-kDecayRate * dt / t60);
    h.taps[static_cast<size_t>(i)] += tail_amp * env * rng->Normal();
  }

  // nothing arrives before the direct sound
  for (int64_t i = 0; i < direct_tap; ++i) h.taps[static_cast<size_t>(i)] = 0.0;
  return h;
}

RirFilter ImageSourceRirGenerator::Generate(const AugmentConfig& config,
                                            RandomStream* rng) const {
  config.Validate();
  std::array<double, 3> room;
  for (int i = 0; i < 3; ++i) room[i] = rng->Uniform(config.room_min[i], config.room_max[i]);
  const double t60 = rng->Uniform(config.t60_low_s, config.t60_high_s);

  const double margin = 0.3;
  auto sample_pos = [&](std::array<double, 3>* p) {
    for (int i = 0; i < 3; ++i) (*p)[i] = rng->Uniform(margin, room[i] - margin);
  };
  std::array<double, 3> src{}, mic{};
  sample_pos(&src);
  sample_pos(&mic);
  // avoid degenerate co-location
  for (int attempt = 0; attempt < 16 && Distance(src, mic) < 0.2; ++attempt) sample_pos(&mic);

  return RenderRir(room, src, mic, t60, kSampleRate, rng);
}

AudioSignal ApplyReverb(const AudioSignal& c, const RirFilter& h) {
  c.Validate();
  TK_REQUIRE(c.sample_rate == h.sample_rate, "rir sample rate mismatch");
  TK_REQUIRE(!h.taps.empty(), "empty rir");
  std::vector<double> conv = FftConvolve(c.samples, h.taps);
  conv.resize(c.samples.size());

  double peak = 0.0;
  for (double v : conv) peak = std::max(peak, std::abs(v));
  if (peak > 1.0) {
    for (auto& v : conv) v /= peak;
  }
  AudioSignal out;
  out.sample_rate = c.sample_rate;
  out.samples = std::move(conv);
  return out;
}

FbankFeature SpecAugment(const FbankFeature& feature, const AugmentConfig& config,
                         RandomStream* rng) {
  TK_REQUIRE(feature.num_frames >= 1 && feature.num_mels >= 1, "empty feature");
  const int64_t num_t = feature.num_frames;
  const int64_t num_f = feature.num_mels;

  const int64_t t_s = static_cast<int64_t>(std::floor(rng->Uniform(0.0, static_cast<double>(num_t))));
  const int64_t t_l = static_cast<int64_t>(std::floor(rng->Uniform(0.0, static_cast<double>(config.time_mask_bound))));
  const int64_t f_s = static_cast<int64_t>(std::floor(rng->Uniform(0.0, static_cast<double>(num_f))));
  const int64_t f_l = static_cast<int64_t>(std::floor(rng->Uniform(0.0, static_cast<double>(config.freq_mask_bound))));

  const int64_t t_end = std::min(num_t - 1, t_s + t_l);
  const int64_t f_end = std::min(num_f - 1, f_s + f_l);

  FbankFeature out = feature;
  for (int64_t t = 0; t < num_t; ++t) {
    for (int64_t f = 0; f < num_f; ++f) {
      const bool masked = (t >= t_s && t <= t_end) || (f >= f_s && f <= f_end);
      if (masked) out.at(t, f) = 0.0;
    }
  }
  return out;
}

AudioSignal SynthesizeNoise(SyntheticNoiseKind kind, int64_t length, RandomStream* rng) {
  TK_REQUIRE(length >= 1, "noise length must be positive");
  AudioSignal out;
  out.sample_rate = kSampleRate;
  out.samples.resize(static_cast<size_t>(length));
  switch (kind) {
    case SyntheticNoiseKind::kWhite: {
      for (auto& v : out.samples) v = rng->Normal();
      break;
    }
    case SyntheticNoiseKind::kPink: {
      // Kellet-style 3-pole pinking filter
      double b0 = 0.0, b1 = 0.0, b2 = 0.0;
      for (auto& v : out.samples) {
        double w = rng->Normal();
        b0 = 0.99765 * b0 + w * 0.0990460;
        b1 = 0.96300 * b1 + w * 0.2965164;
        b2 = 0.57000 * b2 + w * 1.0526913;
        v = b0 + b1 + b2 + w * 0.1848;
      }
      break;
    }
    case SyntheticNoiseKind::kBabble: {
      // several amplitude-modulated resonator-filtered streams
      const double centers[6] = {300, 600, 1000, 1600, 2400, 3200};
      for (int k = 0; k < 6; ++k) {
        double r = 0.98;
        double omega = 2.0 * kPi * centers[k] / kSampleRate;
        double a1 = 2.0 * r * std::cos(omega), a2 = -r * r;
        double y1 = 0.0, y2 = 0.0;
        double am_rate = rng->Uniform(2.0, 8.0);
        double am_phase = rng->Uniform(0.0, 2.0 * kPi);
        for (int64_t i = 0; i < length; ++i) {
          double y = a1 * y1 + a2 * y2 + rng->Normal();
          y2 = y1;
          y1 = y;
          double t = static_cast<double>(i) / kSampleRate;
          double am = 0.5 + 0.5 * std::sin(2.0 * kPi * am_rate * t + am_phase);
          out.samples[static_cast<size_t>(i)] += am * y;
        }
      }
      break;
    }
  }
  const double rms = SignalRms(out.samples);
  if (rms > 0.0) {
    for (auto& v : out.samples) v *= 0.1 / rms;
  }
  return out;
}

ManifestNoiseSource::ManifestNoiseSource(std::vector<UtteranceRecord> records)
    : records_(std::move(records)) {
  TK_REQUIRE(!records_.empty(), "noise manifest is empty");
}

AudioSignal ManifestNoiseSource::Draw(int64_t min_length, RandomStream* rng) const {
  const auto& rec = records_[static_cast<size_t>(
      rng->UniformInt(0, static_cast<int64_t>(records_.size()) - 1))];
  AudioSignal noise = ReadWav(rec.path);
  if (noise.length() < min_length) {
    // loop to cover the requested span
    std::vector<double> looped(static_cast<size_t>(min_length));
    for (int64_t i = 0; i < min_length; ++i) {
      looped[static_cast<size_t>(i)] = noise.samples[static_cast<size_t>(i % noise.length())];
    }
    noise.samples = std::move(looped);
  }
  return noise;
}

AudioSignal SyntheticNoiseSource::Draw(int64_t min_length, RandomStream* rng) const {
  const auto kind = static_cast<SyntheticNoiseKind>(rng->UniformInt(0, 2));
  return SynthesizeNoise(kind, min_length, rng);
}

}  // namespace tsekit
