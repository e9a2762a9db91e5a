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

#include "tsekit/fft.h"

#include <cmath>

#include "tsekit/common.h"

namespace tsekit {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

void Fft(std::vector<std::complex<double>>* x, bool inverse) {
  const size_t n = x->size();
  TK_REQUIRE(IsPowerOfTwo(n), "FFT size must be a power of two");
  auto& a = *x;
  // bit reversal permutation
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    double ang = kTwoPi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
    std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (size_t k = 0; k < len / 2; ++k) {
        std::complex<double> u = a[i + k];
        std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

std::vector<std::complex<double>> Rfft(const std::vector<double>& x) {
  const size_t n = x.size();
  TK_REQUIRE(IsPowerOfTwo(n), "Rfft size must be a power of two");
  std::vector<std::complex<double>> buf(n);
  for (size_t i = 0; i < n; ++i) buf[i] = std::complex<double>(x[i], 0.0);
  Fft(&buf, false);
  buf.resize(n / 2 + 1);
  return buf;
}

std::vector<double> Irfft(const std::vector<std::complex<double>>& bins, int n) {
  TK_REQUIRE(IsPowerOfTwo(static_cast<size_t>(n)), "Irfft size must be a power of two");
  TK_REQUIRE(bins.size() == static_cast<size_t>(n / 2 + 1), "Irfft bin count must be n/2+1");
  std::vector<std::complex<double>> buf(n);
  for (int k = 0; k <= n / 2; ++k) buf[k] = bins[k];
  for (int k = n / 2 + 1; k < n; ++k) buf[k] = std::conj(bins[n - k]);
  Fft(&buf, true);
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = buf[i].real() / static_cast<double>(n);
  return out;
}

std::vector<double> FftConvolve(const std::vector<double>& a, const std::vector<double>& b) {
  TK_REQUIRE(!a.empty() && !b.empty(), "convolution inputs must be non-empty");
  const size_t out_len = a.size() + b.size() - 1;
  size_t n = 1;
  while (n < out_len) n <<= 1;
  std::vector<std::complex<double>> fa(n), fb(n);
  for (size_t i = 0; i < a.size(); ++i) fa[i] = a[i];
  for (size_t i = 0; i < b.size(); ++i) fb[i] = b[i];
  Fft(&fa, false);
  Fft(&fb, false);
  for (size_t i = 0; i < n; ++i) fa[i] *= fb[i];
  Fft(&fa, true);
  std::vector<double> out(out_len);
  for (size_t i = 0; i < out_len; ++i) out[i] = fa[i].real() / static_cast<double>(n);
  return out;
}

}  // namespace tsekit
