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

#ifndef TSEKIT_FFT_H_
#define TSEKIT_FFT_H_

#include <complex>
#include <vector>

namespace tsekit {

// In-place iterative radix-2 FFT. n must be a power of two.
// inverse=true computes the unnormalized inverse transform; divide by n
// yourself if you need the true inverse.
void Fft(std::vector<std::complex<double>>* x, bool inverse);

// Real-input FFT: returns bins 0..n/2 (n/2+1 values).
std::vector<std::complex<double>> Rfft(const std::vector<double>& x);

// Inverse of Rfft: takes n/2+1 bins, returns n real samples (normalized).
std::vector<double> Irfft(const std::vector<std::complex<double>>& bins, int n);

// Full linear convolution via FFT, output length a.size()+b.size()-1.
std::vector<double> FftConvolve(const std::vector<double>& a, const std::vector<double>& b);

inline bool IsPowerOfTwo(size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace tsekit

#endif  // TSEKIT_FFT_H_
