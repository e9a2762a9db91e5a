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

#ifndef TSEKIT_LAYERS_H_
#define TSEKIT_LAYERS_H_

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "tsekit/autodiff.h"
#include "tsekit/rng.h"

namespace tsekit {
namespace nn {

// Named registry of trainable leaves. Models register parameters here so the
// optimizer, checkpoints and gradient checks can walk them by name.
class ParameterStore {
 public:
  Var Create(const std::string& name, Tensor init);
  Var Get(const std::string& name) const;
  bool Has(const std::string& name) const { return index_.count(name) > 0; }
  const std::vector<std::string>& names() const { return names_; }
  size_t size() const { return names_.size(); }
  Var at(size_t i) const { return params_[i]; }

  void ZeroGrad();
  std::map<std::string, Tensor> Snapshot() const;
  // Loads values by name; shapes must match exactly.
  void Load(const std::map<std::string, Tensor>& values);
  int64_t TotalElements() const;

 private:
  std::vector<std::string> names_;
  std::vector<Var> params_;
  std::map<std::string, size_t> index_;
};

// Helper for hierarchical parameter names ("encoder.block1.conv.weight").
class Scope {
 public:
  Scope(ParameterStore* store, std::string prefix) : store_(store), prefix_(std::move(prefix)) {}
  Scope Sub(const std::string& name) const { return Scope(store_, prefix_ + name + "."); }
  Var Create(const std::string& name, Tensor init) const {
    return store_->Create(prefix_ + name, std::move(init));
  }
  ParameterStore* store() const { return store_; }

 private:
  ParameterStore* store_;
  std::string prefix_;
};

// --- initializers ---
Tensor UniformInit(std::vector<int64_t> shape, double bound, RandomStream* rng);
// Kaiming-style fan-in scaling.
Tensor FanInInit(std::vector<int64_t> shape, int64_t fan_in, RandomStream* rng);

// --- layers ---

class Dense {
 public:
  Dense() = default;
  Dense(const Scope& scope, int64_t in_dim, int64_t out_dim, RandomStream* rng);
  Var Forward(const Var& x) const;     // (m x in) -> (m x out)
  Var ForwardVec(const Var& x) const;  // (in) -> (out)
  Var weight() const { return w_; }
  Var bias() const { return b_; }

 private:
  Var w_, b_;
};

// Layer norm over the last (feature) axis of a (rows x features) matrix.
class LayerNorm {
 public:
  LayerNorm() = default;
  LayerNorm(const Scope& scope, int64_t dim, double eps = 1e-5);
  Var Forward(const Var& x) const;

 private:
  Var gamma_, beta_;
  double eps_ = 1e-5;
};

// Per-channel normalization of a (C x H*W) feature map with per-channel affine.
class ChannelNorm {
 public:
  ChannelNorm() = default;
  ChannelNorm(const Scope& scope, int64_t channels, double eps = 1e-5);
  Var Forward(const Var& x) const;

 private:
  Var gamma_, beta_;
  double eps_ = 1e-5;
};

// Single-direction LSTM scanning the row-blocks of a step sequence.
// Input per step: (batch x input_dim). State shapes (batch x hidden).
class LstmCell {
 public:
  LstmCell() = default;
  LstmCell(const Scope& scope, int64_t input_dim, int64_t hidden_dim, RandomStream* rng);
  // One step. h/c carry state, updated in place.
  Var Step(const Var& x, Var* h, Var* c) const;
  int64_t hidden_dim() const { return hidden_; }

 private:
  Var w_ih_, w_hh_, b_;
  int64_t hidden_ = 0;
};

// Bidirectional LSTM over a sequence of (batch x input_dim) steps; outputs
// per-step (batch x 2*hidden).
class BiLstm {
 public:
  BiLstm() = default;
  BiLstm(const Scope& scope, int64_t input_dim, int64_t hidden_dim, RandomStream* rng);
  std::vector<Var> Forward(const std::vector<Var>& steps) const;
  int64_t output_dim() const { return 2 * fwd_.hidden_dim(); }

 private:
  LstmCell fwd_, bwd_;
};

// 3x3-style 2-D convolution over (C x H*W) maps via im2col.
struct FeatureMap {
  Var data;  // (C x H*W)
  int64_t channels = 0;
  int64_t h = 0;
  int64_t w = 0;
};

class Conv2d {
 public:
  Conv2d() = default;
  Conv2d(const Scope& scope, int64_t in_ch, int64_t out_ch, int64_t kernel,
         int64_t stride, int64_t pad, RandomStream* rng);
  FeatureMap Forward(const FeatureMap& x) const;

 private:
  Var w_, b_;
  int64_t in_ch_ = 0, out_ch_ = 0, kernel_ = 1, stride_ = 1, pad_ = 0;
};

// --- optimizer ---

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class AdamOptimizer {
 public:
  explicit AdamOptimizer(ParameterStore* store, AdamConfig config = {});
  // Applies one update at the given learning rate using current grads.
  // Parameters whose requires_grad is false are skipped.
  void Step(double lr);
  void ZeroGrad() { store_->ZeroGrad(); }

 private:
  ParameterStore* store_;
  AdamConfig config_;
  std::vector<Tensor> m_, v_;
  int64_t t_ = 0;
};

}  // namespace nn
}  // namespace tsekit

#endif  // TSEKIT_LAYERS_H_
