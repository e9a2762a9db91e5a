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

#ifndef TSEKIT_TESTS_TEST_UTIL_H_
#define TSEKIT_TESTS_TEST_UTIL_H_

#include <cmath>
#include <functional>
#include <vector>

#include "tsekit/audio.h"
#include "tsekit/autodiff.h"
#include "tsekit/layers.h"
#include "tsekit/rng.h"

namespace tsekit {
namespace testing {

inline std::vector<double> WhiteNoise(int64_t n, RandomStream* rng, double amp = 0.1) {
  std::vector<double> x(static_cast<size_t>(n));
  for (auto& v : x) v = amp * rng->Normal();
  return x;
}

inline AudioSignal NoiseSignal(int64_t n, uint64_t seed, double amp = 0.1) {
  RandomStream rng(seed);
  return AudioSignal{WhiteNoise(n, &rng, amp), kSampleRate};
}

inline AudioSignal Tone(double freq_hz, double seconds, double amp = 0.5,
                        int rate = kSampleRate) {
  int64_t n = static_cast<int64_t>(seconds * rate);
  std::vector<double> x(static_cast<size_t>(n));
  for (int64_t i = 0; i < n; ++i) {
    x[static_cast<size_t>(i)] = amp * std::sin(2.0 * 3.14159265358979323846 * freq_hz * i / rate);
  }
  return AudioSignal{std::move(x), rate};
}

// A chirp with speech-like band coverage and amplitude modulation.
inline AudioSignal SpeechLikeChirp(double seconds, int rate = kSampleRate) {
  int64_t n = static_cast<int64_t>(seconds * rate);
  std::vector<double> x(static_cast<size_t>(n));
  const double pi = 3.14159265358979323846;
  for (int64_t i = 0; i < n; ++i) {
    double t = static_cast<double>(i) / rate;
    double f0 = 100.0, f1 = 7000.0;
    double phase = 2.0 * pi * (f0 * t + 0.5 * (f1 - f0) / seconds * t * t);
    double am = 0.4 + 0.3 * std::sin(2.0 * pi * 3.0 * t);  // syllabic-rate modulation
    x[static_cast<size_t>(i)] = am * std::sin(phase);
  }
  return AudioSignal{std::move(x), rate};
}

// Independent transcription of the SI-SDR definition, kept deliberately
// separate from the library implementation it checks.
inline double SiSdrOracleDb(const std::vector<double>& reference,
                            const std::vector<double>& estimate, double eps = 1e-8) {
  double dot = 0.0, ref_sq = 0.0;
  for (size_t i = 0; i < reference.size(); ++i) {
    dot += estimate[i] * reference[i];
    ref_sq += reference[i] * reference[i];
  }
  double scale = dot / ref_sq;
  double proj_sq = 0.0, resid_sq = 0.0;
  for (size_t i = 0; i < reference.size(); ++i) {
    double proj = scale * reference[i];
    proj_sq += proj * proj;
    double r = estimate[i] - proj;
    resid_sq += r * r;
  }
  return 10.0 * std::log10((proj_sq + eps) / (resid_sq + eps));
}

// Schroeder backward-integration T60 estimate: least-squares slope of the
// energy decay curve between -5 dB and -35 dB.
inline double SchroederT60(const std::vector<double>& taps, int sample_rate) {
  const size_t n = taps.size();
  std::vector<double> edc(n, 0.0);
  double acc = 0.0;
  for (size_t i = n; i-- > 0;) {
    acc += taps[i] * taps[i];
    edc[i] = acc;
  }
  const double top = edc[0];
  size_t i1 = n, i2 = n;
  for (size_t i = 0; i < n; ++i) {
    double db = 10.0 * std::log10(edc[i] / top + 1e-300);
    if (i1 == n && db <= -5.0) i1 = i;
    if (i2 == n && db <= -35.0) {
      i2 = i;
      break;
    }
  }
  if (i1 >= i2 || i2 == n) return -1.0;  // decay range not observable
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  double count = 0.0;
  for (size_t i = i1; i <= i2; ++i) {
    double x = static_cast<double>(i);
    double y = 10.0 * std::log10(edc[i] / top + 1e-300);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    count += 1.0;
  }
  double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);  // dB per sample
  return -60.0 / slope / sample_rate;
}

// Central finite-difference gradient of `loss_fn` w.r.t. every parameter in
// the store, compared against analytic grads. Returns max relative error over
// entries where either gradient is non-negligible.
inline double MaxGradCheckError(nn::ParameterStore* store,
                                const std::function<nn::Var()>& loss_fn,
                                double step = 1e-5, double negligible = 1e-9) {
  store->ZeroGrad();
  nn::Var loss = loss_fn();
  nn::Backward(loss);

  double worst = 0.0;
  for (size_t pi = 0; pi < store->size(); ++pi) {
    nn::Var p = store->at(pi);
    for (int64_t j = 0; j < p.numel(); ++j) {
      double analytic = p.has_grad() ? p.grad()[j] : 0.0;
      double orig = p.value()[j];
      double h = std::max(step, step * std::abs(orig));
      double up, dn;
      {
        nn::NoGradGuard ng;
        p.mutable_value()[j] = orig + h;
        up = loss_fn().value().scalar();
        p.mutable_value()[j] = orig - h;
        dn = loss_fn().value().scalar();
        p.mutable_value()[j] = orig;
      }
      double fd = (up - dn) / (2.0 * h);
      double denom = std::max({std::abs(analytic), std::abs(fd), negligible});
      if (std::abs(analytic) < negligible && std::abs(fd) < negligible) continue;
      worst = std::max(worst, std::abs(analytic - fd) / denom);
    }
  }
  return worst;
}

}  // namespace testing
}  // namespace tsekit

#endif  // TSEKIT_TESTS_TEST_UTIL_H_
