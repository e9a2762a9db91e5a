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

#ifndef TSEKIT_TENSOR_H_
#define TSEKIT_TENSOR_H_

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "tsekit/common.h"

namespace tsekit {
namespace nn {

// Dense row-major tensor of doubles. Rank 1 and 2 cover almost everything in
// this codebase; conv feature maps are kept rank-2 with (H, W) bookkeeping on
// the side.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<int64_t> shape) : shape_(std::move(shape)) {
    data_.assign(static_cast<size_t>(Numel(shape_)), 0.0);
  }
  Tensor(std::vector<int64_t> shape, std::vector<double> data)
      : shape_(std::move(shape)), data_(std::move(data)) {
    TK_REQUIRE(static_cast<int64_t>(data_.size()) == Numel(shape_),
               "tensor data size does not match shape");
  }

  static Tensor Scalar(double v) { return Tensor({1}, {v}); }
  static Tensor Zeros(std::vector<int64_t> shape) { return Tensor(std::move(shape)); }
  static Tensor Full(std::vector<int64_t> shape, double v) {
    Tensor t(std::move(shape));
    for (auto& x : t.data_) x = v;
    return t;
  }

  static int64_t Numel(const std::vector<int64_t>& shape) {
    int64_t n = 1;
    for (int64_t d : shape) {
      TK_REQUIRE(d >= 0, "negative tensor dimension");
      n *= d;
    }
    return n;
  }

  int64_t numel() const { return static_cast<int64_t>(data_.size()); }
  int ndim() const { return static_cast<int>(shape_.size()); }
  const std::vector<int64_t>& shape() const { return shape_; }
  int64_t dim(int i) const { return shape_[static_cast<size_t>(i)]; }

  // 2-D helpers
  int64_t rows() const { return shape_.size() == 2 ? shape_[0] : (shape_.size() == 1 ? 1 : 0); }
  int64_t cols() const { return shape_.size() == 2 ? shape_[1] : (shape_.size() == 1 ? shape_[0] : 0); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  double& operator[](int64_t i) { return data_[static_cast<size_t>(i)]; }
  double operator[](int64_t i) const { return data_[static_cast<size_t>(i)]; }

  double& at(int64_t r, int64_t c) { return data_[static_cast<size_t>(r * shape_[1] + c)]; }
  double at(int64_t r, int64_t c) const { return data_[static_cast<size_t>(r * shape_[1] + c)]; }

  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

  bool all_finite() const {
    for (double v : data_) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

  double scalar() const {
    TK_REQUIRE(numel() == 1, "scalar() on non-scalar tensor");
    return data_[0];
  }

  void Fill(double v) {
    for (auto& x : data_) x = v;
  }

  std::vector<double>& vec() { return data_; }
  const std::vector<double>& vec() const { return data_; }

 private:
  std::vector<int64_t> shape_;
  std::vector<double> data_;
};

}  // namespace nn
}  // namespace tsekit

#endif  // TSEKIT_TENSOR_H_
