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

#ifndef TSEKIT_AUTODIFF_H_
#define TSEKIT_AUTODIFF_H_

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "tsekit/tensor.h"

namespace tsekit {
namespace nn {

// Reverse-mode autodiff over Tensor. The graph is a tape of shared nodes;
// creation order doubles as a topological order, so Backward just walks the
// reachable set in descending id.
struct Node {
  Tensor value;
  Tensor grad;  // allocated on demand
  bool requires_grad = false;
  bool grad_ready = false;
  int64_t id = 0;
  std::vector<std::shared_ptr<Node>> parents;
  // Reads this->grad, accumulates into parents' grads.
  std::function<void(Node*)> backward;

  Tensor& EnsureGrad() {
    if (!grad_ready) {
      grad = Tensor::Zeros(value.shape());
      grad_ready = true;
    }
    return grad;
  }
};

class Var {
 public:
  Var() = default;
  explicit Var(std::shared_ptr<Node> n) : node_(std::move(n)) {}

  bool defined() const { return node_ != nullptr; }
  const Tensor& value() const { return node_->value; }
  Tensor& mutable_value() { return node_->value; }
  const Tensor& grad() const { return node_->grad; }
  bool has_grad() const { return node_->grad_ready; }
  bool requires_grad() const { return node_->requires_grad; }
  void set_requires_grad(bool b) { node_->requires_grad = b; }
  void ZeroGrad() {
    node_->grad_ready = false;
    node_->grad = Tensor();
  }
  std::shared_ptr<Node> node() const { return node_; }

  const std::vector<int64_t>& shape() const { return node_->value.shape(); }
  int64_t numel() const { return node_->value.numel(); }
  int64_t rows() const { return node_->value.rows(); }
  int64_t cols() const { return node_->value.cols(); }

 private:
  std::shared_ptr<Node> node_;
};

// While a guard is alive, newly built ops do not track gradients and do not
// retain parents; used for frozen submodules and detached forward passes.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool prev_;
};

bool GradEnabled();

// Leaf constructors.
Var Constant(Tensor value);
Var Parameter(Tensor value);  // requires_grad = true
Var Detach(const Var& v);     // value copy, no history

// Runs reverse pass from a scalar loss. Accumulates into existing grads.
void Backward(const Var& loss);

// --- elementwise, same shape ---
Var Add(const Var& a, const Var& b);
Var Sub(const Var& a, const Var& b);
Var Mul(const Var& a, const Var& b);
Var Neg(const Var& a);
// --- scalar broadcast ---
Var AddScalar(const Var& a, double s);
Var MulScalar(const Var& a, double s);
Var ScaleBy(const Var& a, const Var& s);  // s is a 1-element Var
// --- unary ---
Var Tanh(const Var& a);
Var Sigmoid(const Var& a);
Var Relu(const Var& a);
Var Exp(const Var& a);
Var Log(const Var& a);   // caller guarantees positivity
Var Sqrt(const Var& a);
Var Square(const Var& a);
// --- reductions ---
Var Sum(const Var& a);                 // -> scalar
Var Mean(const Var& a);                // -> scalar
Var Dot(const Var& a, const Var& b);   // same numel -> scalar
Var SumCols(const Var& a);             // (m x n) -> (m)
Var SumRows(const Var& a);             // (m x n) -> (n)
// --- linear algebra ---
Var Matmul(const Var& a, const Var& b);                       // (m x k)(k x n)
Var Linear(const Var& x, const Var& w, const Var& b);         // (m x k),(n x k),(n) -> (m x n)
Var LinearVec(const Var& x, const Var& w, const Var& b);      // (k),(n x k),(n) -> (n)
Var Transpose(const Var& a);
// --- shape ---
Var Reshape(const Var& a, std::vector<int64_t> shape);
Var SliceRows(const Var& a, int64_t r0, int64_t len);
Var SliceCols(const Var& a, int64_t c0, int64_t len);
Var GatherRows(const Var& a, std::vector<int64_t> idx);
Var ConcatRows(const std::vector<Var>& parts);
Var ConcatCols(const std::vector<Var>& parts);
Var ConcatVec(const std::vector<Var>& parts);  // 1-D concat
// --- broadcast over one axis of a matrix ---
Var MulRowVec(const Var& x, const Var& v);  // (m x n) * row (n)
Var AddRowVec(const Var& x, const Var& v);
Var MulColVec(const Var& x, const Var& v);  // (m x n) * col (m)
Var AddColVec(const Var& x, const Var& v);
// --- normalization ---
// Normalizes every row to zero mean / unit variance (no affine).
Var RowStandardize(const Var& x, double eps);
// --- signal ---
// frames: (frame_len x num_frames); places frame t at t*hop, sums overlaps.
Var OverlapAdd(const Var& frames, int64_t hop, int64_t out_len);
// --- conv ---
// x: (C x H*W). Output ((C*kh*kw) x (ho*wo)) patch matrix.
Var Im2Col(const Var& x, int64_t h, int64_t w, int64_t kh, int64_t kw,
           int64_t stride, int64_t pad);
// --- losses ---
// logits: 1-D (n); returns -log softmax(logits)[label].
Var SoftmaxCrossEntropy(const Var& logits, int64_t label);

}  // namespace nn
}  // namespace tsekit

#endif  // TSEKIT_AUTODIFF_H_
