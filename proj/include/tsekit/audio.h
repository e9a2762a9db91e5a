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

#ifndef TSEKIT_AUDIO_H_
#define TSEKIT_AUDIO_H_

#include <string>
#include <vector>

#include "tsekit/common.h"

namespace tsekit {

// Mono waveform. Samples are dimensionless amplitudes, nominally in [-1, 1].
struct AudioSignal {
  std::vector<double> samples;
  int sample_rate = kSampleRate;

  int64_t length() const { return static_cast<int64_t>(samples.size()); }
  double duration_seconds() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
  void Validate() const;  // length >= 1, finite samples, positive rate
};

double SignalPower(const std::vector<double>& x);  // mean square
double SignalRms(const std::vector<double>& x);

// Reads a RIFF WAV file (PCM16, PCM32, or IEEE float32/64; multi-channel is
// mixed down to mono). Resamples to target_rate when the file rate differs.
AudioSignal ReadWav(const std::string& path, int target_rate = kSampleRate);

// Writes mono float32 WAV.
void WriteWav(const std::string& path, const AudioSignal& signal);

// Windowed-sinc rational resampler; used only at ingestion.
std::vector<double> Resample(const std::vector<double>& x, int from_rate, int to_rate);

}  // namespace tsekit

#endif  // TSEKIT_AUDIO_H_
