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

#include "tsekit/layers.h"

#include <algorithm>
#include <cmath>

namespace tsekit {
namespace nn {

Var ParameterStore::Create(const std::string& name, Tensor init) {
  TK_REQUIRE(!index_.count(name), "duplicate parameter name: " + name);
  Var v = Parameter(std::move(init));
  index_[name] = names_.size();
  names_.push_back(name);
  params_.push_back(v);
  return v;
}

Var ParameterStore::Get(const std::string& name) const {
  auto it = index_.find(name);
  TK_REQUIRE(it != index_.end(), "unknown parameter: " + name);
  return params_[it->second];
}

void ParameterStore::ZeroGrad() {
  for (auto& p : params_) p.ZeroGrad();
}

std::map<std::string, Tensor> ParameterStore::Snapshot() const {
  std::map<std::string, Tensor> out;
  for (size_t i = 0; i < names_.size(); ++i) out[names_[i]] = params_[i].value();
  return out;
}

void ParameterStore::Load(const std::map<std::string, Tensor>& values) {
  for (size_t i = 0; i < names_.size(); ++i) {
    auto it = values.find(names_[i]);
    TK_REQUIRE(it != values.end(), "checkpoint missing parameter: " + names_[i]);
    TK_REQUIRE(it->second.same_shape(params_[i].value()),
               "checkpoint shape mismatch for: " + names_[i]);
    params_[i].mutable_value() = it->second;
  }
}

int64_t ParameterStore::TotalElements() const {
  int64_t n = 0;
  for (const auto& p : params_) n += p.numel();
  return n;
}

Tensor UniformInit(std::vector<int64_t> shape, double bound, RandomStream* rng) {
  Tensor t(std::move(shape));
  for (int64_t i = 0; i < t.numel(); ++i) t[i] = rng->Uniform(-bound, bound);
  return t;
}

Tensor FanInInit(std::vector<int64_t> shape, int64_t fan_in, RandomStream* rng) {
  double bound = 1.0 / std::sqrt(static_cast<double>(std::max<int64_t>(fan_in, 1)));
  return UniformInit(std::move(shape), bound, rng);
}

Dense::Dense(const Scope& scope, int64_t in_dim, int64_t out_dim, RandomStream* rng) {
  w_ = scope.Create("weight", FanInInit({out_dim, in_dim}, in_dim, rng));
  b_ = scope.Create("bias", Tensor::Zeros({out_dim}));
}

Var Dense::Forward(const Var& x) const { return Linear(x, w_, b_); }
Var Dense::ForwardVec(const Var& x) const { return LinearVec(x, w_, b_); }

LayerNorm::LayerNorm(const Scope& scope, int64_t dim, double eps) : eps_(eps) {
  gamma_ = scope.Create("gamma", Tensor::Full({dim}, 1.0));
  beta_ = scope.Create("beta", Tensor::Zeros({dim}));
}

Var LayerNorm::Forward(const Var& x) const {
  return AddRowVec(MulRowVec(RowStandardize(x, eps_), gamma_), beta_);
}

ChannelNorm::ChannelNorm(const Scope& scope, int64_t channels, double eps) : eps_(eps) {
  gamma_ = scope.Create("gamma", Tensor::Full({channels}, 1.0));
  beta_ = scope.Create("beta", Tensor::Zeros({channels}));
}

Var ChannelNorm::Forward(const Var& x) const {
  return AddColVec(MulColVec(RowStandardize(x, eps_), gamma_), beta_);
}

LstmCell::LstmCell(const Scope& scope, int64_t input_dim, int64_t hidden_dim, RandomStream* rng)
    : hidden_(hidden_dim) {
  w_ih_ = scope.Create("w_ih", FanInInit({4 * hidden_dim, input_dim}, input_dim, rng));
  w_hh_ = scope.Create("w_hh", FanInInit({4 * hidden_dim, hidden_dim}, hidden_dim, rng));
  b_ = scope.Create("bias", Tensor::Zeros({4 * hidden_dim}));
}

Var LstmCell::Step(const Var& x, Var* h, Var* c) const {
  Var gates = Add(Linear(x, w_ih_, b_), Linear(*h, w_hh_, Var()));
  Var i = Sigmoid(SliceCols(gates, 0, hidden_));
  Var f = Sigmoid(SliceCols(gates, hidden_, hidden_));
  Var g = Tanh(SliceCols(gates, 2 * hidden_, hidden_));
  Var o = Sigmoid(SliceCols(gates, 3 * hidden_, hidden_));
  *c = Add(Mul(f, *c), Mul(i, g));
  *h = Mul(o, Tanh(*c));
  return *h;
}

BiLstm::BiLstm(const Scope& scope, int64_t input_dim, int64_t hidden_dim, RandomStream* rng)
    : fwd_(scope.Sub("fwd"), input_dim, hidden_dim, rng),
      bwd_(scope.Sub("bwd"), input_dim, hidden_dim, rng) {}

std::vector<Var> BiLstm::Forward(const std::vector<Var>& steps) const {
  TK_REQUIRE(!steps.empty(), "BiLstm: empty sequence");
  const int64_t batch = steps[0].rows();
  const int64_t hid = fwd_.hidden_dim();
  const size_t n = steps.size();

  std::vector<Var> fwd_out(n), bwd_out(n);
  Var h = Constant(Tensor::Zeros({batch, hid}));
  Var c = Constant(Tensor::Zeros({batch, hid}));
  for (size_t t = 0; t < n; ++t) fwd_out[t] = fwd_.Step(steps[t], &h, &c);
  h = Constant(Tensor::Zeros({batch, hid}));
  c = Constant(Tensor::Zeros({batch, hid}));
  for (size_t t = n; t-- > 0;) bwd_out[t] = bwd_.Step(steps[t], &h, &c);

  std::vector<Var> out(n);
  for (size_t t = 0; t < n; ++t) out[t] = ConcatCols({fwd_out[t], bwd_out[t]});
  return out;
}

Conv2d::Conv2d(const Scope& scope, int64_t in_ch, int64_t out_ch, int64_t kernel,
               int64_t stride, int64_t pad, RandomStream* rng)
    : in_ch_(in_ch), out_ch_(out_ch), kernel_(kernel), stride_(stride), pad_(pad) {
  int64_t fan_in = in_ch * kernel * kernel;
  w_ = scope.Create("weight", FanInInit({out_ch, fan_in}, fan_in, rng));
  b_ = scope.Create("bias", Tensor::Zeros({out_ch}));
}

FeatureMap Conv2d::Forward(const FeatureMap& x) const {
  TK_REQUIRE(x.channels == in_ch_, "Conv2d: channel mismatch");
  Var cols = Im2Col(x.data, x.h, x.w, kernel_, kernel_, stride_, pad_);
  Var y = AddColVec(Matmul(w_, cols), b_);
  FeatureMap out;
  out.data = y;
  out.channels = out_ch_;
  out.h = (x.h + 2 * pad_ - kernel_) / stride_ + 1;
  out.w = (x.w + 2 * pad_ - kernel_) / stride_ + 1;
  return out;
}

AdamOptimizer::AdamOptimizer(ParameterStore* store, AdamConfig config)
    : store_(store), config_(config) {
  m_.resize(store->size());
  v_.resize(store->size());
  for (size_t i = 0; i < store->size(); ++i) {
    m_[i] = Tensor::Zeros(store->at(i).value().shape());
    v_[i] = Tensor::Zeros(store->at(i).value().shape());
  }
}

void AdamOptimizer::Step(double lr) {
  ++t_;
  const double b1 = config_.beta1, b2 = config_.beta2;
  const double bc1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  for (size_t i = 0; i < store_->size(); ++i) {
    Var p = store_->at(i);
    if (!p.requires_grad() || !p.has_grad()) continue;
    const Tensor& g = p.grad();
    Tensor& val = p.mutable_value();
    Tensor& m = m_[i];
    Tensor& v = v_[i];
    for (int64_t j = 0; j < val.numel(); ++j) {
      m[j] = b1 * m[j] + (1.0 - b1) * g[j];
      v[j] = b2 * v[j] + (1.0 - b2) * g[j] * g[j];
      double mhat = m[j] / bc1;
      double vhat = v[j] / bc2;
      val[j] -= lr * mhat / (std::sqrt(vhat) + config_.eps);
    }
  }
}

}  // namespace nn
}  // namespace tsekit
