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

#include "tsekit/audio.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

namespace tsekit {

namespace {

constexpr double kPi = 3.141592653589793238462643383279;

uint32_t ReadU32(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}
uint16_t ReadU16(const unsigned char* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

void PutU32(std::vector<unsigned char>* buf, uint32_t v) {
  buf->push_back(v & 0xff);
  buf->push_back((v >> 8) & 0xff);
  buf->push_back((v >> 16) & 0xff);
  buf->push_back((v >> 24) & 0xff);
}
void PutU16(std::vector<unsigned char>* buf, uint16_t v) {
  buf->push_back(v & 0xff);
  buf->push_back((v >> 8) & 0xff);
}

}  // namespace

void AudioSignal::Validate() const {
  TK_REQUIRE(!samples.empty(), "audio signal must have length >= 1");
  TK_REQUIRE(sample_rate > 0, "audio sample rate must be positive");
  for (double v : samples) {
    TK_REQUIRE(std::isfinite(v), "audio signal contains a non-finite sample");
  }
}

double SignalPower(const std::vector<double>& x) {
  if (x.empty()) return 0.0;
  double s = 0.0;
  for (double v : x) s += v * v;
  return s / static_cast<double>(x.size());
}

double SignalRms(const std::vector<double>& x) { return std::sqrt(SignalPower(x)); }

AudioSignal ReadWav(const std::string& path, int target_rate) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RuntimeFailure("cannot open WAV file: " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 44 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw RuntimeFailure("not a RIFF/WAVE file: " + path);
  }

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  size_t data_off = 0, data_len = 0;
  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    uint32_t chunk_len = ReadU32(bytes.data() + pos + 4);
    const unsigned char* cp = bytes.data() + pos;
    if (std::memcmp(cp, "fmt ", 4) == 0 && pos + 8 + 16 <= bytes.size()) {
      format = ReadU16(cp + 8);
      channels = ReadU16(cp + 10);
      rate = ReadU32(cp + 12);
      bits = ReadU16(cp + 22);
    } else if (std::memcmp(cp, "data", 4) == 0) {
      data_off = pos + 8;
      data_len = std::min<size_t>(chunk_len, bytes.size() - data_off);
    }
    pos += 8 + chunk_len + (chunk_len & 1);
  }
  if (data_off == 0) throw RuntimeFailure("WAV file has no data chunk: " + path);
  if (channels == 0) throw RuntimeFailure("WAV file has no fmt chunk: " + path);

  size_t bytes_per_sample = bits / 8;
  size_t frames = data_len / (bytes_per_sample * channels);
  if (frames == 0) throw RuntimeFailure("WAV file is empty: " + path);

  std::vector<double> mono(frames, 0.0);
  const unsigned char* d = bytes.data() + data_off;
  for (size_t i = 0; i < frames; ++i) {
    double acc = 0.0;
    for (size_t c = 0; c < channels; ++c) {
      const unsigned char* s = d + (i * channels + c) * bytes_per_sample;
      double v = 0.0;
      if (format == 1 && bits == 16) {
        int16_t raw = static_cast<int16_t>(s[0] | (s[1] << 8));
        v = static_cast<double>(raw) / 32768.0;
      } else if (format == 1 && bits == 32) {
        int32_t raw = static_cast<int32_t>(ReadU32(s));
        v = static_cast<double>(raw) / 2147483648.0;
      } else if (format == 3 && bits == 32) {
        float f;
        std::memcpy(&f, s, 4);
        v = static_cast<double>(f);
      } else if (format == 3 && bits == 64) {
        double f;
        std::memcpy(&f, s, 8);
        v = f;
      } else {
        throw RuntimeFailure("unsupported WAV encoding in " + path);
      }
      acc += v;
    }
    mono[i] = acc / channels;
  }

  AudioSignal out;
  out.sample_rate = target_rate;
  if (static_cast<int>(rate) == target_rate) {
    out.samples = std::move(mono);
  } else {
    out.samples = Resample(mono, static_cast<int>(rate), target_rate);
  }
  out.Validate();
  return out;
}

void WriteWav(const std::string& path, const AudioSignal& signal) {
  signal.Validate();
  std::vector<unsigned char> buf;
  buf.reserve(44 + signal.samples.size() * 4);
  const uint32_t data_bytes = static_cast<uint32_t>(signal.samples.size() * 4);
  buf.insert(buf.end(), {'R', 'I', 'F', 'F'});
  PutU32(&buf, 36 + data_bytes);
  buf.insert(buf.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  PutU32(&buf, 16);
  PutU16(&buf, 3);  // IEEE float
  PutU16(&buf, 1);  // mono
  PutU32(&buf, static_cast<uint32_t>(signal.sample_rate));
  PutU32(&buf, static_cast<uint32_t>(signal.sample_rate) * 4);
  PutU16(&buf, 4);
  PutU16(&buf, 32);
  buf.insert(buf.end(), {'d', 'a', 't', 'a'});
  PutU32(&buf, data_bytes);
  for (double v : signal.samples) {
    float f = static_cast<float>(v);
    unsigned char b[4];
    std::memcpy(b, &f, 4);
    buf.insert(buf.end(), b, b + 4);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw RuntimeFailure("cannot write WAV file: " + path);
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw RuntimeFailure("short write on WAV file: " + path);
}

std::vector<double> Resample(const std::vector<double>& x, int from_rate, int to_rate) {
  TK_REQUIRE(from_rate > 0 && to_rate > 0, "resample rates must be positive");
  if (from_rate == to_rate) return x;
  const double ratio = static_cast<double>(from_rate) / to_rate;
  const int64_t out_len = static_cast<int64_t>(std::floor(x.size() / ratio));
  TK_REQUIRE(out_len >= 1, "resampled signal would be empty");
  // low-pass at the lower Nyquist
  const double cutoff = 0.95 * 0.5 * std::min(1.0, 1.0 / ratio);
  const int half_width = 16;
  std::vector<double> out(static_cast<size_t>(out_len), 0.0);
  for (int64_t i = 0; i < out_len; ++i) {
    double center = i * ratio;
    int64_t lo = static_cast<int64_t>(std::floor(center)) - half_width;
    int64_t hi = static_cast<int64_t>(std::floor(center)) + half_width + 1;
    double acc = 0.0;
    for (int64_t j = lo; j <= hi; ++j) {
      if (j < 0 || j >= static_cast<int64_t>(x.size())) continue;
      double t = (static_cast<double>(j) - center);
      double sinc = (t == 0.0) ? 2.0 * cutoff
                               : std::sin(2.0 * kPi * cutoff * t) / (kPi * t);
      double win = 0.5 + 0.5 * std::cos(kPi * t / (half_width + 1));  // Hann taper
      acc += x[static_cast<size_t>(j)] * sinc * win;
    }
    out[static_cast<size_t>(i)] = acc;
  }
  return out;
}

}  // namespace tsekit
