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

#include "tsekit/autodiff.h"

#include <Eigen/Core>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <unordered_set>

namespace tsekit {
namespace nn {

namespace {

std::atomic<int64_t> g_next_id{1};
thread_local bool g_grad_enabled = true;

using EMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CMap = Eigen::Map<const EMat>;
using MMap = Eigen::Map<EMat>;

CMap MapOf(const Tensor& t, int64_t r, int64_t c) { return CMap(t.data(), r, c); }
MMap MapOf(Tensor& t, int64_t r, int64_t c) { return MMap(t.data(), r, c); }

std::shared_ptr<Node> NewNode(Tensor value) {
  auto n = std::make_shared<Node>();
  n->value = std::move(value);
  n->id = g_next_id.fetch_add(1);
  return n;
}

// Builds an op node. Parents/backward are only retained when gradients are
// both globally enabled and needed by some parent.
Var MakeOp(Tensor value, std::vector<Var> parents, std::function<void(Node*)> backward) {
  auto n = NewNode(std::move(value));
  bool need = false;
  if (g_grad_enabled) {
    for (const auto& p : parents) need = need || p.requires_grad();
  }
  if (need) {
    n->requires_grad = true;
    n->parents.reserve(parents.size());
    for (auto& p : parents) n->parents.push_back(p.node());
    n->backward = std::move(backward);
  }
  return Var(n);
}

void CheckSameShape(const Var& a, const Var& b, const char* op) {
  TK_REQUIRE(a.value().same_shape(b.value()), std::string(op) + ": shape mismatch");
}

// Accumulate t into parent grad if it participates.
void AccumInto(Node* parent, const Tensor& contrib) {
  if (!parent->requires_grad) return;
  Tensor& g = parent->EnsureGrad();
  const double* s = contrib.data();
  double* d = g.data();
  int64_t n = contrib.numel();
  for (int64_t i = 0; i < n; ++i) d[i] += s[i];
}

}  // namespace

NoGradGuard::NoGradGuard() : prev_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = prev_; }
bool GradEnabled() { return g_grad_enabled; }

Var Constant(Tensor value) { return Var(NewNode(std::move(value))); }

Var Parameter(Tensor value) {
  auto n = NewNode(std::move(value));
  n->requires_grad = true;
  return Var(n);
}

Var Detach(const Var& v) { return Constant(v.value()); }

void Backward(const Var& loss) {
  TK_REQUIRE(loss.defined() && loss.numel() == 1, "Backward expects a scalar loss");
  Node* root = loss.node().get();
  if (!root->requires_grad) return;

  // Collect reachable grad-requiring nodes; creation ids give topo order.
  std::vector<Node*> nodes;
  std::unordered_set<Node*> seen;
  std::vector<Node*> stack{root};
  seen.insert(root);
  while (!stack.empty()) {
    Node* n = stack.back();
    stack.pop_back();
    nodes.push_back(n);
    for (const auto& p : n->parents) {
      Node* pn = p.get();
      if (pn->requires_grad && !seen.count(pn)) {
        seen.insert(pn);
        stack.push_back(pn);
      }
    }
  }
  std::sort(nodes.begin(), nodes.end(), [](Node* a, Node* b) { return a->id > b->id; });

  // Interior grads are scratch space for this pass; only leaves accumulate
  // across Backward calls.
  for (Node* n : nodes) {
    if (n->backward) {
      n->grad_ready = false;
      n->grad = Tensor();
    }
  }
  root->EnsureGrad();
  root->grad[0] += 1.0;
  for (Node* n : nodes) {
    if (n->backward && n->grad_ready) n->backward(n);
  }
}

// ---------- elementwise ----------

Var Add(const Var& a, const Var& b) {
  CheckSameShape(a, b, "Add");
  Tensor out = a.value();
  const double* pb = b.value().data();
  for (int64_t i = 0; i < out.numel(); ++i) out[i] += pb[i];
  return MakeOp(std::move(out), {a, b}, [](Node* n) {
    AccumInto(n->parents[0].get(), n->grad);
    AccumInto(n->parents[1].get(), n->grad);
  });
}

Var Sub(const Var& a, const Var& b) {
  CheckSameShape(a, b, "Sub");
  Tensor out = a.value();
  const double* pb = b.value().data();
  for (int64_t i = 0; i < out.numel(); ++i) out[i] -= pb[i];
  return MakeOp(std::move(out), {a, b}, [](Node* n) {
    AccumInto(n->parents[0].get(), n->grad);
    Node* p1 = n->parents[1].get();
    if (p1->requires_grad) {
      Tensor& g = p1->EnsureGrad();
      for (int64_t i = 0; i < n->grad.numel(); ++i) g[i] -= n->grad[i];
    }
  });
}

Var Mul(const Var& a, const Var& b) {
  CheckSameShape(a, b, "Mul");
  Tensor out = a.value();
  const double* pb = b.value().data();
  for (int64_t i = 0; i < out.numel(); ++i) out[i] *= pb[i];
  return MakeOp(std::move(out), {a, b}, [](Node* n) {
    Node* pa = n->parents[0].get();
    Node* pb2 = n->parents[1].get();
    if (pa->requires_grad) {
      Tensor& g = pa->EnsureGrad();
      for (int64_t i = 0; i < n->grad.numel(); ++i) g[i] += n->grad[i] * pb2->value[i];
    }
    if (pb2->requires_grad) {
      Tensor& g = pb2->EnsureGrad();
      for (int64_t i = 0; i < n->grad.numel(); ++i) g[i] += n->grad[i] * pa->value[i];
    }
  });
}

Var Neg(const Var& a) { return MulScalar(a, -1.0); }

Var AddScalar(const Var& a, double s) {
  Tensor out = a.value();
  for (int64_t i = 0; i < out.numel(); ++i) out[i] += s;
  return MakeOp(std::move(out), {a},
                [](Node* n) { AccumInto(n->parents[0].get(), n->grad); });
}

Var MulScalar(const Var& a, double s) {
  Tensor out = a.value();
  for (int64_t i = 0; i < out.numel(); ++i) out[i] *= s;
  return MakeOp(std::move(out), {a}, [s](Node* n) {
    Node* p = n->parents[0].get();
    if (!p->requires_grad) return;
    Tensor& g = p->EnsureGrad();
    for (int64_t i = 0; i < n->grad.numel(); ++i) g[i] += s * n->grad[i];
  });
}

Var ScaleBy(const Var& a, const Var& s) {
  TK_REQUIRE(s.numel() == 1, "ScaleBy expects a 1-element scale");
  const double sv = s.value()[0];
  Tensor out = a.value();
  for (int64_t i = 0; i < out.numel(); ++i) out[i] *= sv;
  return MakeOp(std::move(out), {a, s}, [sv](Node* n) {
    Node* pa = n->parents[0].get();
    Node* ps = n->parents[1].get();
    if (pa->requires_grad) {
      Tensor& g = pa->EnsureGrad();
      for (int64_t i = 0; i < n->grad.numel(); ++i) g[i] += sv * n->grad[i];
    }
    if (ps->requires_grad) {
      Tensor& g = ps->EnsureGrad();
      double acc = 0.0;
      for (int64_t i = 0; i < n->grad.numel(); ++i) acc += n->grad[i] * pa->value[i];
      g[0] += acc;
    }
  });
}

namespace {
// Shared machinery for unary ops whose derivative is a function of the output
// or of the input.
Var UnaryFromOutput(const Var& a, Tensor out, double (*dfn)(double y)) {
  return MakeOp(std::move(out), {a}, [dfn](Node* n) {
    Node* p = n->parents[0].get();
    if (!p->requires_grad) return;
    Tensor& g = p->EnsureGrad();
    for (int64_t i = 0; i < n->grad.numel(); ++i) g[i] += n->grad[i] * dfn(n->value[i]);
  });
}
Var UnaryFromInput(const Var& a, Tensor out, double (*dfn)(double x)) {
  return MakeOp(std::move(out), {a}, [dfn](Node* n) {
    Node* p = n->parents[0].get();
    if (!p->requires_grad) return;
    Tensor& g = p->EnsureGrad();
    for (int64_t i = 0; i < n->grad.numel(); ++i) g[i] += n->grad[i] * dfn(p->value[i]);
  });
}
}  // namespace

Var Tanh(const Var& a) {
  Tensor out = a.value();
  for (int64_t i = 0; i < out.numel(); ++i) out[i] = std::tanh(out[i]);
  return UnaryFromOutput(a, std::move(out), +[](double y) { return 1.0 - y * y; });
}

Var Sigmoid(const Var& a) {
  Tensor out = a.value();
  for (int64_t i = 0; i < out.numel(); ++i) out[i] = 1.0 / (1.0 + std::exp(-out[i]));
  return UnaryFromOutput(a, std::move(out), +[](double y) { return y * (1.0 - y); });
}

Var Relu(const Var& a) {
  Tensor out = a.value();
  for (int64_t i = 0; i < out.numel(); ++i) out[i] = out[i] > 0.0 ? out[i] : 0.0;
  return UnaryFromInput(a, std::move(out), +[](double x) { return x > 0.0 ? 1.0 : 0.0; });
}

Var Exp(const Var& a) {
  Tensor out = a.value();
  for (int64_t i = 0; i < out.numel(); ++i) out[i] = std::exp(out[i]);
  return UnaryFromOutput(a, std::move(out), +[](double y) { return y; });
}

Var Log(const Var& a) {
  Tensor out = a.value();
  for (int64_t i = 0; i < out.numel(); ++i) out[i] = std::log(out[i]);
  return UnaryFromInput(a, std::move(out), +[](double x) { return 1.0 / x; });
}

Var Sqrt(const Var& a) {
  Tensor out = a.value();
  for (int64_t i = 0; i < out.numel(); ++i) out[i] = std::sqrt(out[i]);
  return UnaryFromOutput(a, std::move(out), +[](double y) { return 0.5 / y; });
}

Var Square(const Var& a) {
  Tensor out = a.value();
  for (int64_t i = 0; i < out.numel(); ++i) out[i] *= out[i];
  return UnaryFromInput(a, std::move(out), +[](double x) { return 2.0 * x; });
}

// ---------- reductions ----------

Var Sum(const Var& a) {
  double s = 0.0;
  for (int64_t i = 0; i < a.numel(); ++i) s += a.value()[i];
  return MakeOp(Tensor::Scalar(s), {a}, [](Node* n) {
    Node* p = n->parents[0].get();
    if (!p->requires_grad) return;
    Tensor& g = p->EnsureGrad();
    double gs = n->grad[0];
    for (int64_t i = 0; i < g.numel(); ++i) g[i] += gs;
  });
}

Var Mean(const Var& a) { return MulScalar(Sum(a), 1.0 / static_cast<double>(a.numel())); }

Var Dot(const Var& a, const Var& b) {
  TK_REQUIRE(a.numel() == b.numel(), "Dot: size mismatch");
  double s = 0.0;
  for (int64_t i = 0; i < a.numel(); ++i) s += a.value()[i] * b.value()[i];
  return MakeOp(Tensor::Scalar(s), {a, b}, [](Node* n) {
    Node* pa = n->parents[0].get();
    Node* pb = n->parents[1].get();
    double gs = n->grad[0];
    if (pa->requires_grad) {
      Tensor& g = pa->EnsureGrad();
      for (int64_t i = 0; i < g.numel(); ++i) g[i] += gs * pb->value[i];
    }
    if (pb->requires_grad) {
      Tensor& g = pb->EnsureGrad();
      for (int64_t i = 0; i < g.numel(); ++i) g[i] += gs * pa->value[i];
    }
  });
}

Var SumCols(const Var& a) {
  TK_REQUIRE(a.value().ndim() == 2, "SumCols expects a matrix");
  int64_t m = a.rows(), c = a.cols();
  Tensor out({m});
  for (int64_t i = 0; i < m; ++i) {
    double s = 0.0;
    for (int64_t j = 0; j < c; ++j) s += a.value().at(i, j);
    out[i] = s;
  }
  return MakeOp(std::move(out), {a}, [m, c](Node* n) {
    Node* p = n->parents[0].get();
    if (!p->requires_grad) return;
    Tensor& g = p->EnsureGrad();
    for (int64_t i = 0; i < m; ++i)
      for (int64_t j = 0; j < c; ++j) g.at(i, j) += n->grad[i];
  });
}

Var SumRows(const Var& a) {
  TK_REQUIRE(a.value().ndim() == 2, "SumRows expects a matrix");
  int64_t m = a.rows(), c = a.cols();
  Tensor out({c});
  for (int64_t i = 0; i < m; ++i)
    for (int64_t j = 0; j < c; ++j) out[j] += a.value().at(i, j);
  return MakeOp(std::move(out), {a}, [m, c](Node* n) {
    Node* p = n->parents[0].get();
    if (!p->requires_grad) return;
    Tensor& g = p->EnsureGrad();
    for (int64_t i = 0; i < m; ++i)
      for (int64_t j = 0; j < c; ++j) g.at(i, j) += n->grad[j];
  });
}

// ---------- linear algebra ----------

Var Matmul(const Var& a, const Var& b) {
  TK_REQUIRE(a.value().ndim() == 2 && b.value().ndim() == 2, "Matmul expects matrices");
  int64_t m = a.rows(), k = a.cols(), k2 = b.rows(), n2 = b.cols();
  TK_REQUIRE(k == k2, "Matmul: inner dimension mismatch");
  Tensor out({m, n2});
  MapOf(out, m, n2) = MapOf(a.value(), m, k) * MapOf(b.value(), k2, n2);
  return MakeOp(std::move(out), {a, b}, [m, k, n2](Node* n) {
    Node* pa = n->parents[0].get();
    Node* pb = n->parents[1].get();
    const Tensor& gt = n->grad;
    CMap g = MapOf(gt, m, n2);
    if (pa->requires_grad) {
      Tensor& ga = pa->EnsureGrad();
      MapOf(ga, m, k) += g * MapOf(pb->value, k, n2).transpose();
    }
    if (pb->requires_grad) {
      Tensor& gb = pb->EnsureGrad();
      MapOf(gb, k, n2) += MapOf(pa->value, m, k).transpose() * g;
    }
  });
}

Var Linear(const Var& x, const Var& w, const Var& b) {
  TK_REQUIRE(x.value().ndim() == 2 && w.value().ndim() == 2, "Linear expects matrices");
  int64_t m = x.rows(), k = x.cols(), n_out = w.rows();
  TK_REQUIRE(w.cols() == k, "Linear: weight shape mismatch");
  bool with_bias = b.defined();
  if (with_bias) TK_REQUIRE(b.numel() == n_out, "Linear: bias size mismatch");
  Tensor out({m, n_out});
  MapOf(out, m, n_out) = MapOf(x.value(), m, k) * MapOf(w.value(), n_out, k).transpose();
  if (with_bias) {
    for (int64_t i = 0; i < m; ++i)
      for (int64_t j = 0; j < n_out; ++j) out.at(i, j) += b.value()[j];
  }
  std::vector<Var> parents = with_bias ? std::vector<Var>{x, w, b} : std::vector<Var>{x, w};
  return MakeOp(std::move(out), std::move(parents), [m, k, n_out, with_bias](Node* n) {
    Node* px = n->parents[0].get();
    Node* pw = n->parents[1].get();
    const Tensor& gt = n->grad;
    CMap g = MapOf(gt, m, n_out);
    if (px->requires_grad) {
      MapOf(px->EnsureGrad(), m, k) += g * MapOf(pw->value, n_out, k);
    }
    if (pw->requires_grad) {
      MapOf(pw->EnsureGrad(), n_out, k) += g.transpose() * MapOf(px->value, m, k);
    }
    if (with_bias) {
      Node* pb = n->parents[2].get();
      if (pb->requires_grad) {
        Tensor& gb = pb->EnsureGrad();
        for (int64_t i = 0; i < m; ++i)
          for (int64_t j = 0; j < n_out; ++j) gb[j] += n->grad.at(i, j);
      }
    }
  });
}

Var LinearVec(const Var& x, const Var& w, const Var& b) {
  TK_REQUIRE(x.value().ndim() == 1, "LinearVec expects a vector input");
  Var x2 = Reshape(x, {1, x.numel()});
  Var y = Linear(x2, w, b);
  return Reshape(y, {y.cols()});
}

Var Transpose(const Var& a) {
  TK_REQUIRE(a.value().ndim() == 2, "Transpose expects a matrix");
  int64_t m = a.rows(), c = a.cols();
  Tensor out({c, m});
  for (int64_t i = 0; i < m; ++i)
    for (int64_t j = 0; j < c; ++j) out.at(j, i) = a.value().at(i, j);
  return MakeOp(std::move(out), {a}, [m, c](Node* n) {
    Node* p = n->parents[0].get();
    if (!p->requires_grad) return;
    Tensor& g = p->EnsureGrad();
    for (int64_t i = 0; i < m; ++i)
      for (int64_t j = 0; j < c; ++j) g.at(i, j) += n->grad.at(j, i);
  });
}

// ---------- shape ----------

Var Reshape(const Var& a, std::vector<int64_t> shape) {
  TK_REQUIRE(Tensor::Numel(shape) == a.numel(), "Reshape: element count mismatch");
  Tensor out(shape, a.value().vec());
  return MakeOp(std::move(out), {a}, [](Node* n) {
    Node* p = n->parents[0].get();
    if (!p->requires_grad) return;
    Tensor& g = p->EnsureGrad();
    for (int64_t i = 0; i < g.numel(); ++i) g[i] += n->grad[i];
  });
}

Var SliceRows(const Var& a, int64_t r0, int64_t len) {
  TK_REQUIRE(a.value().ndim() == 2, "SliceRows expects a matrix");
  TK_REQUIRE(r0 >= 0 && len >= 0 && r0 + len <= a.rows(), "SliceRows out of range");
  int64_t c = a.cols();
  Tensor out({len, c});
  std::copy_n(a.value().data() + r0 * c, len * c, out.data());
  return MakeOp(std::move(out), {a}, [r0, len, c](Node* n) {
    Node* p = n->parents[0].get();
    if (!p->requires_grad) return;
    Tensor& g = p->EnsureGrad();
    double* dst = g.data() + r0 * c;
    const double* src = n->grad.data();
    for (int64_t i = 0; i < len * c; ++i) dst[i] += src[i];
  });
}

Var SliceCols(const Var& a, int64_t c0, int64_t len) {
  TK_REQUIRE(a.value().ndim() == 2, "SliceCols expects a matrix");
  TK_REQUIRE(c0 >= 0 && len >= 0 && c0 + len <= a.cols(), "SliceCols out of range");
  int64_t m = a.rows(), c = a.cols();
  Tensor out({m, len});
  for (int64_t i = 0; i < m; ++i)
    std::copy_n(a.value().data() + i * c + c0, len, out.data() + i * len);
  return MakeOp(std::move(out), {a}, [m, c, c0, len](Node* n) {
    Node* p = n->parents[0].get();
    if (!p->requires_grad) return;
    Tensor& g = p->EnsureGrad();
    for (int64_t i = 0; i < m; ++i) {
      double* dst = g.data() + i * c + c0;
      const double* src = n->grad.data() + i * len;
      for (int64_t j = 0; j < len; ++j) dst[j] += src[j];
    }
  });
}

Var GatherRows(const Var& a, std::vector<int64_t> idx) {
  TK_REQUIRE(a.value().ndim() == 2, "GatherRows expects a matrix");
  int64_t c = a.cols(), m = a.rows();
  for (int64_t i : idx) TK_REQUIRE(i >= 0 && i < m, "GatherRows index out of range");
  Tensor out({static_cast<int64_t>(idx.size()), c});
  for (size_t r = 0; r < idx.size(); ++r)
    std::copy_n(a.value().data() + idx[r] * c, c, out.data() + static_cast<int64_t>(r) * c);
  return MakeOp(std::move(out), {a}, [idx = std::move(idx), c](Node* n) {
    Node* p = n->parents[0].get();
    if (!p->requires_grad) return;
    Tensor& g = p->EnsureGrad();
    for (size_t r = 0; r < idx.size(); ++r) {
      double* dst = g.data() + idx[r] * c;
      const double* src = n->grad.data() + static_cast<int64_t>(r) * c;
      for (int64_t j = 0; j < c; ++j) dst[j] += src[j];
    }
  });
}

Var ConcatRows(const std::vector<Var>& parts) {
  TK_REQUIRE(!parts.empty(), "ConcatRows: empty input");
  int64_t c = parts[0].cols(), m = 0;
  for (const auto& p : parts) {
    TK_REQUIRE(p.value().ndim() == 2 && p.cols() == c, "ConcatRows: column mismatch");
    m += p.rows();
  }
  Tensor out({m, c});
  int64_t off = 0;
  std::vector<int64_t> row_counts;
  for (const auto& p : parts) {
    std::copy_n(p.value().data(), p.rows() * c, out.data() + off * c);
    row_counts.push_back(p.rows());
    off += p.rows();
  }
  return MakeOp(std::move(out), parts, [row_counts = std::move(row_counts), c](Node* n) {
    int64_t off2 = 0;
    for (size_t k = 0; k < n->parents.size(); ++k) {
      Node* p = n->parents[k].get();
      int64_t rows = row_counts[k];
      if (p->requires_grad) {
        Tensor& g = p->EnsureGrad();
        const double* src = n->grad.data() + off2 * c;
        for (int64_t i = 0; i < rows * c; ++i) g[i] += src[i];
      }
      off2 += rows;
    }
  });
}

Var ConcatCols(const std::vector<Var>& parts) {
  TK_REQUIRE(!parts.empty(), "ConcatCols: empty input");
  int64_t m = parts[0].rows(), c = 0;
  for (const auto& p : parts) {
    TK_REQUIRE(p.value().ndim() == 2 && p.rows() == m, "ConcatCols: row mismatch");
    c += p.cols();
  }
  Tensor out({m, c});
  std::vector<int64_t> col_counts;
  int64_t off = 0;
  for (const auto& p : parts) {
    for (int64_t i = 0; i < m; ++i)
      std::copy_n(p.value().data() + i * p.cols(), p.cols(), out.data() + i * c + off);
    col_counts.push_back(p.cols());
    off += p.cols();
  }
  return MakeOp(std::move(out), parts, [col_counts = std::move(col_counts), m, c](Node* n) {
    int64_t off2 = 0;
    for (size_t k = 0; k < n->parents.size(); ++k) {
      Node* p = n->parents[k].get();
      int64_t w = col_counts[k];
      if (p->requires_grad) {
        Tensor& g = p->EnsureGrad();
        for (int64_t i = 0; i < m; ++i) {
          const double* src = n->grad.data() + i * c + off2;
          double* dst = g.data() + i * w;
          for (int64_t j = 0; j < w; ++j) dst[j] += src[j];
        }
      }
      off2 += w;
    }
  });
}

Var ConcatVec(const std::vector<Var>& parts) {
  TK_REQUIRE(!parts.empty(), "ConcatVec: empty input");
  int64_t total = 0;
  for (const auto& p : parts) {
    TK_REQUIRE(p.value().ndim() == 1, "ConcatVec expects vectors");
    total += p.numel();
  }
  Tensor out({total});
  std::vector<int64_t> sizes;
  int64_t off = 0;
  for (const auto& p : parts) {
    std::copy_n(p.value().data(), p.numel(), out.data() + off);
    sizes.push_back(p.numel());
    off += p.numel();
  }
  return MakeOp(std::move(out), parts, [sizes = std::move(sizes)](Node* n) {
    int64_t off2 = 0;
    for (size_t k = 0; k < n->parents.size(); ++k) {
      Node* p = n->parents[k].get();
      if (p->requires_grad) {
        Tensor& g = p->EnsureGrad();
        const double* src = n->grad.data() + off2;
        for (int64_t i = 0; i < sizes[k]; ++i) g[i] += src[i];
      }
      off2 += sizes[k];
    }
  });
}

// ---------- broadcast ----------

Var MulRowVec(const Var& x, const Var& v) {
  TK_REQUIRE(x.value().ndim() == 2 && v.numel() == x.cols(), "MulRowVec: shape mismatch");
  int64_t m = x.rows(), c = x.cols();
  Tensor out = x.value();
  for (int64_t i = 0; i < m; ++i)
    for (int64_t j = 0; j < c; ++j) out.at(i, j) *= v.value()[j];
  return MakeOp(std::move(out), {x, v}, [m, c](Node* n) {
    Node* px = n->parents[0].get();
    Node* pv = n->parents[1].get();
    if (px->requires_grad) {
      Tensor& g = px->EnsureGrad();
      for (int64_t i = 0; i < m; ++i)
        for (int64_t j = 0; j < c; ++j) g.at(i, j) += n->grad.at(i, j) * pv->value[j];
    }
    if (pv->requires_grad) {
      Tensor& g = pv->EnsureGrad();
      for (int64_t i = 0; i < m; ++i)
        for (int64_t j = 0; j < c; ++j) g[j] += n->grad.at(i, j) * px->value.at(i, j);
    }
  });
}

Var AddRowVec(const Var& x, const Var& v) {
  TK_REQUIRE(x.value().ndim() == 2 && v.numel() == x.cols(), "AddRowVec: shape mismatch");
  int64_t m = x.rows(), c = x.cols();
  Tensor out = x.value();
  for (int64_t i = 0; i < m; ++i)
    for (int64_t j = 0; j < c; ++j) out.at(i, j) += v.value()[j];
  return MakeOp(std::move(out), {x, v}, [m, c](Node* n) {
    AccumInto(n->parents[0].get(), n->grad);
    Node* pv = n->parents[1].get();
    if (pv->requires_grad) {
      Tensor& g = pv->EnsureGrad();
      for (int64_t i = 0; i < m; ++i)
        for (int64_t j = 0; j < c; ++j) g[j] += n->grad.at(i, j);
    }
  });
}

Var MulColVec(const Var& x, const Var& v) {
  TK_REQUIRE(x.value().ndim() == 2 && v.numel() == x.rows(), "MulColVec: shape mismatch");
  int64_t m = x.rows(), c = x.cols();
  Tensor out = x.value();
  for (int64_t i = 0; i < m; ++i)
    for (int64_t j = 0; j < c; ++j) out.at(i, j) *= v.value()[i];
  return MakeOp(std::move(out), {x, v}, [m, c](Node* n) {
    Node* px = n->parents[0].get();
    Node* pv = n->parents[1].get();
    if (px->requires_grad) {
      Tensor& g = px->EnsureGrad();
      for (int64_t i = 0; i < m; ++i)
        for (int64_t j = 0; j < c; ++j) g.at(i, j) += n->grad.at(i, j) * pv->value[i];
    }
    if (pv->requires_grad) {
      Tensor& g = pv->EnsureGrad();
      for (int64_t i = 0; i < m; ++i)
        for (int64_t j = 0; j < c; ++j) g[i] += n->grad.at(i, j) * px->value.at(i, j);
    }
  });
}

Var AddColVec(const Var& x, const Var& v) {
  TK_REQUIRE(x.value().ndim() == 2 && v.numel() == x.rows(), "AddColVec: shape mismatch");
  int64_t m = x.rows(), c = x.cols();
  Tensor out = x.value();
  for (int64_t i = 0; i < m; ++i)
    for (int64_t j = 0; j < c; ++j) out.at(i, j) += v.value()[i];
  return MakeOp(std::move(out), {x, v}, [m, c](Node* n) {
    AccumInto(n->parents[0].get(), n->grad);
    Node* pv = n->parents[1].get();
    if (pv->requires_grad) {
      Tensor& g = pv->EnsureGrad();
      for (int64_t i = 0; i < m; ++i)
        for (int64_t j = 0; j < c; ++j) g[i] += n->grad.at(i, j);
    }
  });
}

// ---------- normalization ----------

Var RowStandardize(const Var& x, double eps) {
  TK_REQUIRE(x.value().ndim() == 2, "RowStandardize expects a matrix");
  int64_t m = x.rows(), c = x.cols();
  TK_REQUIRE(c >= 1, "RowStandardize: empty rows");
  Tensor out({m, c});
  Tensor inv_std({m});
  for (int64_t i = 0; i < m; ++i) {
    double mean = 0.0;
    for (int64_t j = 0; j < c; ++j) mean += x.value().at(i, j);
    mean /= static_cast<double>(c);
    double var = 0.0;
    for (int64_t j = 0; j < c; ++j) {
      double d = x.value().at(i, j) - mean;
      var += d * d;
    }
    var /= static_cast<double>(c);
    double is = 1.0 / std::sqrt(var + eps);
    inv_std[i] = is;
    for (int64_t j = 0; j < c; ++j) out.at(i, j) = (x.value().at(i, j) - mean) * is;
  }
  // dx = is * (g - mean(g) - xhat * mean(g*xhat)) per row
  return MakeOp(std::move(out), {x}, [m, c, inv_std = std::move(inv_std)](Node* n) {
    Node* p = n->parents[0].get();
    if (!p->requires_grad) return;
    Tensor& g = p->EnsureGrad();
    for (int64_t i = 0; i < m; ++i) {
      double gmean = 0.0, gx = 0.0;
      for (int64_t j = 0; j < c; ++j) {
        gmean += n->grad.at(i, j);
        gx += n->grad.at(i, j) * n->value.at(i, j);
      }
      gmean /= static_cast<double>(c);
      gx /= static_cast<double>(c);
      for (int64_t j = 0; j < c; ++j) {
        g.at(i, j) += inv_std[i] * (n->grad.at(i, j) - gmean - n->value.at(i, j) * gx);
      }
    }
  });
}

// ---------- signal ----------

Var OverlapAdd(const Var& frames, int64_t hop, int64_t out_len) {
  TK_REQUIRE(frames.value().ndim() == 2, "OverlapAdd expects (frame_len x num_frames)");
  TK_REQUIRE(hop >= 1, "OverlapAdd: hop must be positive");
  int64_t flen = frames.rows(), nf = frames.cols();
  Tensor out({out_len});
  for (int64_t t = 0; t < nf; ++t) {
    int64_t base = t * hop;
    for (int64_t i = 0; i < flen; ++i) {
      int64_t pos = base + i;
      if (pos >= 0 && pos < out_len) out[pos] += frames.value().at(i, t);
    }
  }
  return MakeOp(std::move(out), {frames}, [hop, flen, nf, out_len](Node* n) {
    Node* p = n->parents[0].get();
    if (!p->requires_grad) return;
    Tensor& g = p->EnsureGrad();
    for (int64_t t = 0; t < nf; ++t) {
      int64_t base = t * hop;
      for (int64_t i = 0; i < flen; ++i) {
        int64_t pos = base + i;
        if (pos >= 0 && pos < out_len) g.at(i, t) += n->grad[pos];
      }
    }
  });
}

// ---------- conv ----------

Var Im2Col(const Var& x, int64_t h, int64_t w, int64_t kh, int64_t kw,
           int64_t stride, int64_t pad) {
  TK_REQUIRE(x.value().ndim() == 2, "Im2Col expects (C x H*W)");
  TK_REQUIRE(x.cols() == h * w, "Im2Col: H*W mismatch");
  TK_REQUIRE(stride >= 1 && kh >= 1 && kw >= 1 && pad >= 0, "Im2Col: bad geometry");
  int64_t channels = x.rows();
  int64_t ho = (h + 2 * pad - kh) / stride + 1;
  int64_t wo = (w + 2 * pad - kw) / stride + 1;
  TK_REQUIRE(ho >= 1 && wo >= 1, "Im2Col: kernel larger than padded input");
  int64_t out_rows = channels * kh * kw;
  int64_t out_cols = ho * wo;
  // source index per output cell, -1 for zero padding
  std::vector<int64_t> src(static_cast<size_t>(out_rows * out_cols), -1);
  Tensor out({out_rows, out_cols});
  for (int64_t ci = 0; ci < channels; ++ci) {
    for (int64_t ki = 0; ki < kh; ++ki) {
      for (int64_t kj = 0; kj < kw; ++kj) {
        int64_t r = (ci * kh + ki) * kw + kj;
        for (int64_t oi = 0; oi < ho; ++oi) {
          int64_t ii = oi * stride + ki - pad;
          for (int64_t oj = 0; oj < wo; ++oj) {
            int64_t jj = oj * stride + kj - pad;
            int64_t col = oi * wo + oj;
            if (ii >= 0 && ii < h && jj >= 0 && jj < w) {
              int64_t s = ci * (h * w) + ii * w + jj;
              src[static_cast<size_t>(r * out_cols + col)] = s;
              out.at(r, col) = x.value()[s];
            }
          }
        }
      }
    }
  }
  return MakeOp(std::move(out), {x},
                [src = std::move(src), out_rows, out_cols](Node* n) {
                  Node* p = n->parents[0].get();
                  if (!p->requires_grad) return;
                  Tensor& g = p->EnsureGrad();
                  for (int64_t i = 0; i < out_rows * out_cols; ++i) {
                    int64_t s = src[static_cast<size_t>(i)];
                    if (s >= 0) g[s] += n->grad[i];
                  }
                });
}

// ---------- losses ----------

Var SoftmaxCrossEntropy(const Var& logits, int64_t label) {
  TK_REQUIRE(logits.value().ndim() == 1, "SoftmaxCrossEntropy expects a vector");
  int64_t n_cls = logits.numel();
  TK_REQUIRE(label >= 0 && label < n_cls, "class label out of range");
  double mx = logits.value()[0];
  for (int64_t i = 1; i < n_cls; ++i) mx = std::max(mx, logits.value()[i]);
  double lse = 0.0;
  for (int64_t i = 0; i < n_cls; ++i) lse += std::exp(logits.value()[i] - mx);
  lse = std::log(lse) + mx;
  double loss = lse - logits.value()[label];
  return MakeOp(Tensor::Scalar(loss), {logits}, [label, n_cls, lse](Node* n) {
    Node* p = n->parents[0].get();
    if (!p->requires_grad) return;
    Tensor& g = p->EnsureGrad();
    double gs = n->grad[0];
    for (int64_t i = 0; i < n_cls; ++i) {
      double soft = std::exp(p->value[i] - lse);
      g[i] += gs * (soft - (i == label ? 1.0 : 0.0));
    }
  });
}

}  // namespace nn
}  // namespace tsekit
