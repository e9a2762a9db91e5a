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

#include <cmath>

#include "doctest.h"
#include "test_util.h"
#include "tsekit/autodiff.h"
#include "tsekit/layers.h"

using namespace tsekit;
using namespace tsekit::nn;
using tsekit::testing::MaxGradCheckError;

namespace {

Tensor RandomTensor(std::vector<int64_t> shape, RandomStream* rng, double scale = 1.0) {
  Tensor t(std::move(shape));
  for (int64_t i = 0; i < t.numel(); ++i) t[i] = scale * rng->Normal();
  return t;
}

}  // namespace

TEST_SUITE_BEGIN("autodiff");

TEST_CASE("elementwise ops match finite differences") {
  RandomStream rng(1);
  ParameterStore store;
  Var a = store.Create("a", RandomTensor({3, 4}, &rng));
  Var b = store.Create("b", RandomTensor({3, 4}, &rng));

  auto loss = [&]() {
    Var y = Mul(Add(a, b), Tanh(Sub(a, MulScalar(b, 0.3))));
    y = Add(y, Sigmoid(a));
    y = Add(y, Relu(b));
    return Sum(Mul(y, y));
  };
  CHECK(MaxGradCheckError(&store, loss) < 1e-6);
}

TEST_CASE("log exp sqrt square chain") {
  RandomStream rng(2);
  ParameterStore store;
  Tensor init = RandomTensor({5}, &rng);
  for (int64_t i = 0; i < init.numel(); ++i) init[i] = 0.5 + std::abs(init[i]);
  Var a = store.Create("a", init);
  auto loss = [&]() { return Sum(Log(AddScalar(Square(Sqrt(a)), 1.0))); };
  CHECK(MaxGradCheckError(&store, loss) < 1e-6);

  store.ZeroGrad();
  Var l = loss();
  Backward(l);
  // d/da log(a + 1) = 1 / (a + 1)
  for (int64_t i = 0; i < a.numel(); ++i) {
    CHECK(a.grad()[i] == doctest::Approx(1.0 / (a.value()[i] + 1.0)).epsilon(1e-9));
  }
}

TEST_CASE("matmul and linear match finite differences") {
  RandomStream rng(3);
  ParameterStore store;
  Var a = store.Create("a", RandomTensor({3, 4}, &rng));
  Var w = store.Create("w", RandomTensor({5, 4}, &rng));
  Var bias = store.Create("bias", RandomTensor({5}, &rng));
  Var m = store.Create("m", RandomTensor({4, 3}, &rng));

  auto loss = [&]() {
    Var y = Linear(a, w, bias);           // 3x5
    Var z = Matmul(Transpose(y), y);      // 5x5
    Var q = Matmul(a, m);                 // 3x3
    return Add(Sum(z), Sum(Tanh(q)));
  };
  CHECK(MaxGradCheckError(&store, loss) < 1e-6);
}

TEST_CASE("reductions broadcasts and slices match finite differences") {
  RandomStream rng(4);
  ParameterStore store;
  Var x = store.Create("x", RandomTensor({4, 6}, &rng));
  Var rv = store.Create("rv", RandomTensor({6}, &rng));
  Var cv = store.Create("cv", RandomTensor({4}, &rng));

  auto loss = [&]() {
    Var y = AddRowVec(MulRowVec(x, rv), rv);
    y = AddColVec(MulColVec(y, cv), cv);
    Var s1 = Dot(SumRows(y), rv);
    Var s2 = Dot(SumCols(y), cv);
    Var sl = Sum(Square(SliceRows(y, 1, 2)));
    Var sc = Sum(Square(SliceCols(y, 2, 3)));
    Var g = Sum(Tanh(GatherRows(y, {3, 0, 3})));
    return Add(Add(Add(s1, s2), Add(sl, sc)), g);
  };
  CHECK(MaxGradCheckError(&store, loss) < 1e-6);
}

TEST_CASE("concat reshape transpose match finite differences") {
  RandomStream rng(5);
  ParameterStore store;
  Var a = store.Create("a", RandomTensor({2, 3}, &rng));
  Var b = store.Create("b", RandomTensor({2, 3}, &rng));
  Var v1 = store.Create("v1", RandomTensor({4}, &rng));
  Var v2 = store.Create("v2", RandomTensor({3}, &rng));

  auto loss = [&]() {
    Var rows = ConcatRows({a, b});                       // 4x3
    Var cols = ConcatCols({a, Transpose(Reshape(b, {3, 2}))});  // 2x(3+3)... 3x2 -> T = 2x3
    Var vec = ConcatVec({v1, v2, Reshape(a, {6})});
    return Add(Add(Sum(Tanh(rows)), Sum(Sigmoid(cols))), Sum(Square(vec)));
  };
  CHECK(MaxGradCheckError(&store, loss) < 1e-6);
}

TEST_CASE("row standardize matches finite differences") {
  RandomStream rng(6);
  ParameterStore store;
  Var x = store.Create("x", RandomTensor({3, 7}, &rng, 2.0));
  // weight the output so the loss is not invariant to the standardization
  Var w = Constant(RandomTensor({3, 7}, &rng));
  auto loss = [&]() {
    Var y = RowStandardize(x, 1e-5);
    return Add(Sum(Mul(y, w)), Sum(Square(Mul(y, w))));
  };
  CHECK(MaxGradCheckError(&store, loss) < 1e-6);
}

TEST_CASE("overlap add matches finite differences and sums frames") {
  RandomStream rng(7);
  ParameterStore store;
  Var frames = store.Create("frames", RandomTensor({4, 3}, &rng));
  auto loss = [&]() { return Sum(Square(OverlapAdd(frames, 2, 9))); };
  CHECK(MaxGradCheckError(&store, loss) < 1e-6);

  // forward value check: frame t lands at t*hop
  Tensor f({2, 2});
  f.at(0, 0) = 1.0;
  f.at(1, 0) = 2.0;
  f.at(0, 1) = 10.0;
  f.at(1, 1) = 20.0;
  Var out = OverlapAdd(Constant(f), 1, 3);
  CHECK(out.value()[0] == 1.0);
  CHECK(out.value()[1] == 12.0);
  CHECK(out.value()[2] == 20.0);
}

TEST_CASE("im2col conv matches finite differences") {
  RandomStream rng(8);
  ParameterStore store;
  Var x = store.Create("x", RandomTensor({2, 5 * 4}, &rng));  // C=2, H=5, W=4
  Var w = store.Create("w", RandomTensor({3, 2 * 3 * 3}, &rng));
  auto loss = [&]() {
    Var cols = Im2Col(x, 5, 4, 3, 3, 2, 1);
    return Sum(Tanh(Matmul(w, cols)));
  };
  CHECK(MaxGradCheckError(&store, loss) < 1e-6);
}

TEST_CASE("softmax cross entropy value and gradient") {
  RandomStream rng(9);
  ParameterStore store;
  Var logits = store.Create("logits", RandomTensor({7}, &rng, 2.0));
  auto loss = [&]() { return SoftmaxCrossEntropy(logits, 3); };
  CHECK(MaxGradCheckError(&store, loss) < 1e-6);

  // independent recomputation with long double accumulation
  long double denom = 0.0;
  for (int64_t i = 0; i < 7; ++i) denom += std::exp(static_cast<long double>(logits.value()[i]));
  long double expected = -(static_cast<long double>(logits.value()[3]) - std::log(denom));
  CHECK(loss().value().scalar() ==
        doctest::Approx(static_cast<double>(expected)).epsilon(1e-12));
}

TEST_CASE("lstm cell and bilstm match finite differences") {
  RandomStream rng(10);
  ParameterStore store;
  Scope root(&store, "");
  BiLstm rnn(root.Sub("rnn"), 3, 4, &rng);
  Dense proj(root.Sub("proj"), 8, 3, &rng);

  std::vector<Tensor> inputs;
  for (int t = 0; t < 5; ++t) inputs.push_back(RandomTensor({2, 3}, &rng));

  auto loss = [&]() {
    std::vector<Var> steps;
    for (const auto& x : inputs) steps.push_back(Constant(x));
    auto out = rnn.Forward(steps);
    Var acc;
    for (const auto& h : out) {
      Var y = proj.Forward(h);
      acc = acc.defined() ? Add(acc, Sum(Square(y))) : Sum(Square(y));
    }
    return acc;
  };
  CHECK(MaxGradCheckError(&store, loss, 1e-5) < 1e-5);
}

TEST_CASE("detach and no-grad block gradient flow") {
  ParameterStore store;
  Var p = store.Create("p", Tensor({3}, {1.0, 2.0, 3.0}));

  Var y = Sum(Square(Detach(MulScalar(p, 2.0))));
  Backward(y);
  CHECK_FALSE(p.has_grad());

  {
    NoGradGuard ng;
    Var z = Sum(Square(MulScalar(p, 2.0)));
    CHECK_FALSE(z.requires_grad());
    Backward(z);
  }
  CHECK_FALSE(p.has_grad());

  // control: with grads on, gradient arrives
  Var w = Sum(Square(MulScalar(p, 2.0)));
  Backward(w);
  REQUIRE(p.has_grad());
  CHECK(p.grad()[0] == doctest::Approx(8.0));  // d/dp (2p)^2 = 8p
}

TEST_CASE("gradient accumulates across backward calls and reused nodes") {
  ParameterStore store;
  Var p = store.Create("p", Tensor({1}, {3.0}));
  Var shared = MulScalar(p, 2.0);
  Var y = Add(Mul(shared, shared), shared);  // 4p^2 + 2p -> dy/dp = 8p + 2
  Backward(y);
  CHECK(p.grad()[0] == doctest::Approx(26.0));
  Backward(y);  // second pass accumulates
  CHECK(p.grad()[0] == doctest::Approx(52.0));
}

TEST_CASE("adam reduces a simple quadratic") {
  ParameterStore store;
  Var p = store.Create("p", Tensor({2}, {5.0, -3.0}));
  AdamOptimizer opt(&store);
  double first = 0.0, last = 0.0;
  for (int it = 0; it < 200; ++it) {
    opt.ZeroGrad();
    Var loss = Sum(Square(p));
    if (it == 0) first = loss.value().scalar();
    last = loss.value().scalar();
    Backward(loss);
    opt.Step(0.1);
  }
  CHECK(last < 1e-2 * first);
}

TEST_CASE("frozen parameters are skipped by the optimizer") {
  ParameterStore store;
  Var p = store.Create("p", Tensor({1}, {2.0}));
  Var q = store.Create("q", Tensor({1}, {2.0}));
  q.set_requires_grad(false);
  AdamOptimizer opt(&store);
  opt.ZeroGrad();
  Var loss = Add(Sum(Square(p)), Sum(Square(q)));
  Backward(loss);
  CHECK_FALSE(q.has_grad());
  opt.Step(0.05);
  CHECK(p.value()[0] != 2.0);
  CHECK(q.value()[0] == 2.0);
}

TEST_SUITE_END();
