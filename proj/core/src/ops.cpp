// Copyright 2026 The MKPNet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "mkp/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>

MKP_NAMESPACE_BEGIN

namespace {

using MatR = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapR = Eigen::Map<MatR>;
using ConstMapR = Eigen::Map<const MatR>;

[[noreturn]] void shape_fail(const char* op, const std::string& detail) {
  throw ShapeError(std::string(op) + ": " + detail);
}

void check_finite(const char* op, const Tensor& t) {
  if (!t.defined()) throw ConfigError(std::string(op) + ": undefined input");
  for (Real v : t.values()) {
    if (!std::isfinite(v)) {
      throw NumericError(std::string(op) + ": non-finite input value in tensor " +
                         shape_string(t.shape()));
    }
  }
}


// Wraps `values` as the op's output; records a node when any input needs it.
template <typename Backward>
Tensor make_output(const char* op, Shape shape, std::vector<Real> values,
                   std::vector<Tensor> inputs, Backward&& backward_fn) {
  Tensor out = Tensor::from(std::move(shape), std::move(values));
  bool record = grad_recording_enabled();
  if (record) {
    record = std::any_of(inputs.begin(), inputs.end(),
                         [](const Tensor& t) { return t.requires_grad(); });
  }
  if (!record) return out;
  auto node = std::make_shared<Node>();
  node->op = op;
  for (auto& t : inputs) node->inputs.push_back(t.impl());
  node->backward = std::forward<Backward>(backward_fn);
  out.impl()->requires_grad = true;
  out.impl()->node = std::move(node);
  return out;
}

// Gradient target for input `i` of a node, or null when it needs none.
std::vector<Real>* grad_of(const std::shared_ptr<TensorImpl>& t) {
  return t->requires_grad ? &t->grad_buffer() : nullptr;
}

bool is_suffix(const Shape& small, const Shape& big) {
  if (small.size() > big.size()) return false;
  return std::equal(small.rbegin(), small.rend(), big.rbegin());
}

void check_broadcast(const char* op, const Tensor& a, const Tensor& b) {
  if (!is_suffix(b.shape(), a.shape())) {
    shape_fail(op, "cannot broadcast " + shape_string(b.shape()) + " onto " +
                       shape_string(a.shape()));
  }
}

std::size_t last_dim(const Tensor& t) { return t.shape().back(); }

enum class Binary { kAdd, kSub, kMul };

Tensor binary(const char* op, Binary kind, const Tensor& a, const Tensor& b) {
  check_finite(op, a);
  check_finite(op, b);
  check_broadcast(op, a, b);
  const std::size_t n = a.numel();
  const std::size_t m = b.numel();
  auto av = a.values();
  auto bv = b.values();
  std::vector<Real> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Real x = av[i], y = bv[i % m];
    switch (kind) {
      case Binary::kAdd: out[i] = x + y; break;
      case Binary::kSub: out[i] = x - y; break;
      case Binary::kMul: out[i] = x * y; break;
    }
  }
  return make_output(op, a.shape(), std::move(out), {a, b},
                     [kind, n, m](const TensorImpl& o) {
                       const auto& in_a = o.node->inputs[0];
                       const auto& in_b = o.node->inputs[1];
                       auto* ga = grad_of(in_a);
                       auto* gb = grad_of(in_b);
                       const auto& g = o.grad;
                       for (std::size_t i = 0; i < n; ++i) {
                         const std::size_t j = i % m;
                         switch (kind) {
                           case Binary::kAdd:
                             if (ga) (*ga)[i] += g[i];
                             if (gb) (*gb)[j] += g[i];
                             break;
                           case Binary::kSub:
                             if (ga) (*ga)[i] += g[i];
                             if (gb) (*gb)[j] -= g[i];
                             break;
                           case Binary::kMul:
                             if (ga) (*ga)[i] += g[i] * in_b->value[j];
                             if (gb) (*gb)[j] += g[i] * in_a->value[i];
                             break;
                         }
                       }
                     });
}

template <typename Fwd, typename Deriv>
Tensor unary(const char* op, const Tensor& x, Fwd fwd, Deriv deriv) {
  check_finite(op, x);
  auto xv = x.values();
  std::vector<Real> out(xv.size());
  for (std::size_t i = 0; i < xv.size(); ++i) out[i] = fwd(xv[i]);
  return make_output(op, x.shape(), std::move(out), {x},
                     [deriv](const TensorImpl& o) {
                       const auto& in = o.node->inputs[0];
                       auto* gx = grad_of(in);
                       if (!gx) return;
                       for (std::size_t i = 0; i < o.grad.size(); ++i) {
                         (*gx)[i] += o.grad[i] * deriv(in->value[i], o.value[i]);
                       }
                     });
}

}  // namespace

namespace ops {

Tensor matmul(const Tensor& a, const Tensor& b) {
  check_finite("matmul", a);
  check_finite("matmul", b);
  if (b.rank() != 2 || a.rank() < 1 || last_dim(a) != b.dim(0)) {
    shape_fail("matmul", "incompatible shapes " + shape_string(a.shape()) +
                             " x " + shape_string(b.shape()));
  }
  const auto k = static_cast<Eigen::Index>(b.dim(0));
  const auto n = static_cast<Eigen::Index>(b.dim(1));
  const auto m = static_cast<Eigen::Index>(a.numel() / b.dim(0));
  std::vector<Real> out(static_cast<std::size_t>(m * n));
  MapR(out.data(), m, n).noalias() =
      ConstMapR(a.values().data(), m, k) * ConstMapR(b.values().data(), k, n);
  Shape shape = a.shape();
  shape.back() = b.dim(1);
  return make_output("matmul", std::move(shape), std::move(out), {a, b},
                     [m, k, n](const TensorImpl& o) {
                       const auto& in_a = o.node->inputs[0];
                       const auto& in_b = o.node->inputs[1];
                       ConstMapR g(o.grad.data(), m, n);
                       if (auto* ga = grad_of(in_a)) {
                         MapR(ga->data(), m, k).noalias() +=
                             g * ConstMapR(in_b->value.data(), k, n).transpose();
                       }
                       if (auto* gb = grad_of(in_b)) {
                         MapR(gb->data(), k, n).noalias() +=
                             ConstMapR(in_a->value.data(), m, k).transpose() * g;
                       }
                     });
}

Tensor add(const Tensor& a, const Tensor& b) {
  return binary("add", Binary::kAdd, a, b);
}
Tensor sub(const Tensor& a, const Tensor& b) {
  return binary("sub", Binary::kSub, a, b);
}
Tensor mul(const Tensor& a, const Tensor& b) {
  return binary("mul", Binary::kMul, a, b);
}

Tensor scale(const Tensor& a, Real factor) {
  return unary(
      "scale", a, [factor](Real x) { return x * factor; },
      [factor](Real, Real) { return factor; });
}

Tensor concat(std::span<const Tensor> parts) {
  if (parts.empty()) shape_fail("concat", "no inputs");
  const Shape& first = parts[0].shape();
  Shape lead(first.begin(), first.end() - 1);
  std::vector<std::size_t> widths;
  std::size_t total = 0;
  for (const Tensor& p : parts) {
    check_finite("concat", p);
    const Shape& s = p.shape();
    if (s.size() != first.size() || !std::equal(lead.begin(), lead.end(), s.begin())) {
      shape_fail("concat", "leading dims differ: " + shape_string(first) +
                               " vs " + shape_string(s));
    }
    widths.push_back(s.back());
    total += s.back();
  }
  const std::size_t rows = shape_numel(lead);
  std::vector<Real> out(rows * total);
  std::size_t offset = 0;
  for (std::size_t p = 0; p < parts.size(); ++p) {
    auto v = parts[p].values();
    for (std::size_t r = 0; r < rows; ++r) {
      std::copy_n(v.begin() + static_cast<std::ptrdiff_t>(r * widths[p]), widths[p],
                  out.begin() + static_cast<std::ptrdiff_t>(r * total + offset));
    }
    offset += widths[p];
  }
  Shape shape = lead;
  shape.push_back(total);
  std::vector<Tensor> inputs(parts.begin(), parts.end());
  return make_output("concat", std::move(shape), std::move(out), std::move(inputs),
                     [rows, total, widths](const TensorImpl& o) {
                       std::size_t offset = 0;
                       for (std::size_t p = 0; p < widths.size(); ++p) {
                         if (auto* g = grad_of(o.node->inputs[p])) {
                           for (std::size_t r = 0; r < rows; ++r) {
                             for (std::size_t c = 0; c < widths[p]; ++c) {
                               (*g)[r * widths[p] + c] += o.grad[r * total + offset + c];
                             }
                           }
                         }
                         offset += widths[p];
                       }
                     });
}

Tensor concat(std::initializer_list<Tensor> parts) {
  return concat(std::span<const Tensor>(parts.begin(), parts.size()));
}

Tensor tanh(const Tensor& x) {
  return unary(
      "tanh", x, [](Real v) { return std::tanh(v); },
      [](Real, Real y) { return Real(1) - y * y; });
}

Tensor exp(const Tensor& x) {
  return unary(
      "exp", x, [](Real v) { return std::exp(v); }, [](Real, Real y) { return y; });
}

Tensor log(const Tensor& x) {
  for (Real v : x.values()) {
    if (!(v > Real(0))) throw NumericError("log: non-positive input");
  }
  return unary(
      "log", x, [](Real v) { return std::log(v); },
      [](Real v, Real) { return Real(1) / v; });
}

Tensor gelu(const Tensor& x) {
  constexpr Real kC = static_cast<Real>(0.7978845608028654);  // sqrt(2/pi)
  constexpr Real kA = static_cast<Real>(0.044715);
  return unary(
      "gelu", x,
      [](Real v) { return Real(0.5) * v * (Real(1) + std::tanh(kC * (v + kA * v * v * v))); },
      [](Real v, Real) {
        const Real t = std::tanh(kC * (v + kA * v * v * v));
        return Real(0.5) * (Real(1) + t) +
               Real(0.5) * v * (Real(1) - t * t) * kC * (Real(1) + Real(3) * kA * v * v);
      });
}

Tensor clamp(const Tensor& x, Real lo, Real hi) {
  if (!(lo <= hi)) throw ConfigError("clamp: lo > hi");
  return unary(
      "clamp", x, [lo, hi](Real v) { return std::clamp(v, lo, hi); },
      [lo, hi](Real v, Real) { return (v >= lo && v <= hi) ? Real(1) : Real(0); });
}

Tensor softmax(const Tensor& x) {
  check_finite("softmax", x);
  const std::size_t n = last_dim(x);
  const std::size_t rows = x.numel() / n;
  auto xv = x.values();
  std::vector<Real> out(x.numel());
  for (std::size_t r = 0; r < rows; ++r) {
    const Real* in = xv.data() + r * n;
    Real* y = out.data() + r * n;
    const Real mx = *std::max_element(in, in + n);
    Real z = 0;
    for (std::size_t i = 0; i < n; ++i) z += (y[i] = std::exp(in[i] - mx));
    for (std::size_t i = 0; i < n; ++i) y[i] /= z;
  }
  return make_output("softmax", x.shape(), std::move(out), {x},
                     [rows, n](const TensorImpl& o) {
                       auto* gx = grad_of(o.node->inputs[0]);
                       if (!gx) return;
                       for (std::size_t r = 0; r < rows; ++r) {
                         const Real* y = o.value.data() + r * n;
                         const Real* g = o.grad.data() + r * n;
                         Real dot = 0;
                         for (std::size_t i = 0; i < n; ++i) dot += g[i] * y[i];
                         for (std::size_t i = 0; i < n; ++i) {
                           (*gx)[r * n + i] += y[i] * (g[i] - dot);
                         }
                       }
                     });
}

Tensor sum(const Tensor& x) {
  check_finite("sum", x);
  Real s = 0;
  for (Real v : x.values()) s += v;
  return make_output("sum", {1}, {s}, {x}, [](const TensorImpl& o) {
    if (auto* gx = grad_of(o.node->inputs[0])) {
      for (Real& g : *gx) g += o.grad[0];
    }
  });
}

Tensor mean(const Tensor& x) {
  check_finite("mean", x);
  Real s = 0;
  for (Real v : x.values()) s += v;
  const Real inv = Real(1) / static_cast<Real>(x.numel());
  return make_output("mean", {1}, {s * inv}, {x}, [inv](const TensorImpl& o) {
    if (auto* gx = grad_of(o.node->inputs[0])) {
      for (Real& g : *gx) g += o.grad[0] * inv;
    }
  });
}

Tensor embedding(const Tensor& table, std::span<const int> ids,
                 const Shape& out_prefix) {
  check_finite("embedding", table);
  if (table.rank() != 2) {
    shape_fail("embedding", "table must be 2-D, got " + shape_string(table.shape()));
  }
  if (shape_numel(out_prefix) != ids.size() || ids.empty()) {
    shape_fail("embedding", "prefix " + shape_string(out_prefix) + " does not hold " +
                                std::to_string(ids.size()) + " ids");
  }
  const std::size_t vocab = table.dim(0), d = table.dim(1);
  auto tv = table.values();
  std::vector<Real> out(ids.size() * d);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || static_cast<std::size_t>(ids[i]) >= vocab) {
      shape_fail("embedding", "id " + std::to_string(ids[i]) + " outside table of " +
                                  std::to_string(vocab) + " rows");
    }
    std::copy_n(tv.begin() + static_cast<std::ptrdiff_t>(ids[i] * d), d,
                out.begin() + static_cast<std::ptrdiff_t>(i * d));
  }
  Shape shape = out_prefix;
  shape.push_back(d);
  std::vector<int> saved(ids.begin(), ids.end());
  return make_output("embedding", std::move(shape), std::move(out), {table},
                     [saved = std::move(saved), d](const TensorImpl& o) {
                       auto* gt = grad_of(o.node->inputs[0]);
                       if (!gt) return;
                       for (std::size_t i = 0; i < saved.size(); ++i) {
                         Real* row = gt->data() + static_cast<std::size_t>(saved[i]) * d;
                         const Real* g = o.grad.data() + i * d;
                         for (std::size_t c = 0; c < d; ++c) row[c] += g[c];
                       }
                     });
}

Tensor embedding(const Tensor& table, std::span<const int> ids) {
  return embedding(table, ids, Shape{ids.size()});
}

Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta, Real eps) {
  check_finite("layer_norm", x);
  check_finite("layer_norm", gamma);
  check_finite("layer_norm", beta);
  const std::size_t n = last_dim(x);
  if (gamma.shape() != Shape{n} || beta.shape() != Shape{n}) {
    shape_fail("layer_norm", "gain/bias " + shape_string(gamma.shape()) + "/" +
                                 shape_string(beta.shape()) + " for input " +
                                 shape_string(x.shape()));
  }
  const std::size_t rows = x.numel() / n;
  auto xv = x.values();
  auto gv = gamma.values();
  auto bv = beta.values();
  std::vector<Real> out(x.numel());
  std::vector<Real> xhat(x.numel());
  std::vector<Real> rstd(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const Real* in = xv.data() + r * n;
    Real mu = 0;
    for (std::size_t i = 0; i < n; ++i) mu += in[i];
    mu /= static_cast<Real>(n);
    Real var = 0;
    for (std::size_t i = 0; i < n; ++i) var += (in[i] - mu) * (in[i] - mu);
    var /= static_cast<Real>(n);
    rstd[r] = Real(1) / std::sqrt(var + eps);
    for (std::size_t i = 0; i < n; ++i) {
      xhat[r * n + i] = (in[i] - mu) * rstd[r];
      out[r * n + i] = xhat[r * n + i] * gv[i] + bv[i];
    }
  }
  return make_output(
      "layer_norm", x.shape(), std::move(out), {x, gamma, beta},
      [rows, n, xhat = std::move(xhat), rstd = std::move(rstd)](const TensorImpl& o) {
        const auto& gam = o.node->inputs[1]->value;
        auto* gx = grad_of(o.node->inputs[0]);
        auto* gg = grad_of(o.node->inputs[1]);
        auto* gb = grad_of(o.node->inputs[2]);
        const Real inv_n = Real(1) / static_cast<Real>(n);
        for (std::size_t r = 0; r < rows; ++r) {
          const Real* g = o.grad.data() + r * n;
          const Real* xh = xhat.data() + r * n;
          if (gg || gb) {
            for (std::size_t i = 0; i < n; ++i) {
              if (gg) (*gg)[i] += g[i] * xh[i];
              if (gb) (*gb)[i] += g[i];
            }
          }
          if (!gx) continue;
          Real mean_d = 0, mean_dx = 0;
          for (std::size_t i = 0; i < n; ++i) {
            const Real dxh = g[i] * gam[i];
            mean_d += dxh;
            mean_dx += dxh * xh[i];
          }
          mean_d *= inv_n;
          mean_dx *= inv_n;
          for (std::size_t i = 0; i < n; ++i) {
            const Real dxh = g[i] * gam[i];
            (*gx)[r * n + i] += rstd[r] * (dxh - mean_d - xh[i] * mean_dx);
          }
        }
      });
}

Tensor attention(const Tensor& q, const Tensor& k, const Tensor& v,
                 std::span<const std::uint8_t> key_mask, std::size_t heads) {
  check_finite("attention", q);
  check_finite("attention", k);
  check_finite("attention", v);
  if (q.rank() != 3 || k.rank() != 3 || v.rank() != 3 || k.shape() != v.shape() ||
      q.dim(0) != k.dim(0) || q.dim(2) != k.dim(2)) {
    shape_fail("attention", "q " + shape_string(q.shape()) + ", k " +
                                shape_string(k.shape()) + ", v " + shape_string(v.shape()));
  }
  const std::size_t batch = q.dim(0), tq = q.dim(1), tk = k.dim(1), d = q.dim(2);
  if (heads == 0 || d % heads != 0) {
    shape_fail("attention", "model dim " + std::to_string(d) +
                                " not divisible by heads " + std::to_string(heads));
  }
  if (key_mask.size() != batch * tk) {
    shape_fail("attention", "mask has " + std::to_string(key_mask.size()) +
                                " entries, expected " + std::to_string(batch * tk));
  }
  const std::size_t dh = d / heads;
  const Real inv_sqrt = Real(1) / std::sqrt(static_cast<Real>(dh));
  auto qv = q.values(), kv = k.values(), vv = v.values();
  std::vector<Real> out(batch * tq * d, Real(0));
  std::vector<Real> probs(batch * heads * tq * tk, Real(0));
  for (std::size_t b = 0; b < batch; ++b) {
    const std::uint8_t* mask = key_mask.data() + b * tk;
    if (std::none_of(mask, mask + tk, [](std::uint8_t m) { return m != 0; })) {
      throw ShapeError("attention: sequence " + std::to_string(b) + " has no unmasked keys");
    }
    for (std::size_t h = 0; h < heads; ++h) {
      for (std::size_t i = 0; i < tq; ++i) {
        const Real* qi = qv.data() + (b * tq + i) * d + h * dh;
        Real* p = probs.data() + ((b * heads + h) * tq + i) * tk;
        Real mx = -std::numeric_limits<Real>::infinity();
        for (std::size_t j = 0; j < tk; ++j) {
          if (!mask[j]) continue;
          const Real* kj = kv.data() + (b * tk + j) * d + h * dh;
          Real s = 0;
          for (std::size_t c = 0; c < dh; ++c) s += qi[c] * kj[c];
          p[j] = s * inv_sqrt;
          mx = std::max(mx, p[j]);
        }
        Real z = 0;
        for (std::size_t j = 0; j < tk; ++j) {
          if (!mask[j]) continue;
          p[j] = std::exp(p[j] - mx);
          z += p[j];
        }
        Real* oi = out.data() + (b * tq + i) * d + h * dh;
        for (std::size_t j = 0; j < tk; ++j) {
          if (!mask[j]) continue;
          p[j] /= z;
          const Real* vj = vv.data() + (b * tk + j) * d + h * dh;
          for (std::size_t c = 0; c < dh; ++c) oi[c] += p[j] * vj[c];
        }
      }
    }
  }
  std::vector<std::uint8_t> mask_copy(key_mask.begin(), key_mask.end());
  return make_output(
      "attention", q.shape(), std::move(out), {q, k, v},
      [batch, tq, tk, d, heads, dh, inv_sqrt, probs = std::move(probs),
       mask_copy = std::move(mask_copy)](const TensorImpl& o) {
        const auto& qi_t = o.node->inputs[0];
        const auto& ki_t = o.node->inputs[1];
        const auto& vi_t = o.node->inputs[2];
        auto* gq = grad_of(qi_t);
        auto* gk = grad_of(ki_t);
        auto* gv = grad_of(vi_t);
        std::vector<Real> dp(tk);
        for (std::size_t b = 0; b < batch; ++b) {
          const std::uint8_t* mask = mask_copy.data() + b * tk;
          for (std::size_t h = 0; h < heads; ++h) {
            for (std::size_t i = 0; i < tq; ++i) {
              const Real* p = probs.data() + ((b * heads + h) * tq + i) * tk;
              const Real* go = o.grad.data() + (b * tq + i) * d + h * dh;
              Real dot = 0;
              for (std::size_t j = 0; j < tk; ++j) {
                if (!mask[j]) continue;
                const std::size_t kv_off = (b * tk + j) * d + h * dh;
                Real s = 0;
                for (std::size_t c = 0; c < dh; ++c) s += go[c] * vi_t->value[kv_off + c];
                dp[j] = s;
                dot += p[j] * s;
                if (gv) {
                  for (std::size_t c = 0; c < dh; ++c) (*gv)[kv_off + c] += p[j] * go[c];
                }
              }
              const std::size_t q_off = (b * tq + i) * d + h * dh;
              for (std::size_t j = 0; j < tk; ++j) {
                if (!mask[j]) continue;
                const Real ds = p[j] * (dp[j] - dot) * inv_sqrt;
                const std::size_t kv_off = (b * tk + j) * d + h * dh;
                if (gq) {
                  for (std::size_t c = 0; c < dh; ++c) (*gq)[q_off + c] += ds * ki_t->value[kv_off + c];
                }
                if (gk) {
                  for (std::size_t c = 0; c < dh; ++c) (*gk)[kv_off + c] += ds * qi_t->value[q_off + c];
                }
              }
            }
          }
        }
      });
}

Tensor select_position(const Tensor& x, std::size_t t) {
  check_finite("select_position", x);
  if (x.rank() != 3 || t >= x.dim(1)) {
    shape_fail("select_position", "position " + std::to_string(t) + " of " +
                                      shape_string(x.shape()));
  }
  const std::size_t batch = x.dim(0), len = x.dim(1), d = x.dim(2);
  auto xv = x.values();
  std::vector<Real> out(batch * d);
  for (std::size_t b = 0; b < batch; ++b) {
    std::copy_n(xv.begin() + static_cast<std::ptrdiff_t>((b * len + t) * d), d,
                out.begin() + static_cast<std::ptrdiff_t>(b * d));
  }
  return make_output("select_position", {batch, d}, std::move(out), {x},
                     [batch, len, d, t](const TensorImpl& o) {
                       auto* gx = grad_of(o.node->inputs[0]);
                       if (!gx) return;
                       for (std::size_t b = 0; b < batch; ++b) {
                         for (std::size_t c = 0; c < d; ++c) {
                           (*gx)[(b * len + t) * d + c] += o.grad[b * d + c];
                         }
                       }
                     });
}

Tensor reshape(const Tensor& x, Shape shape) {
  if (shape_numel(shape) != x.numel()) {
    shape_fail("reshape", shape_string(x.shape()) + " -> " + shape_string(shape));
  }
  std::vector<Real> out(x.values().begin(), x.values().end());
  return make_output("reshape", std::move(shape), std::move(out), {x},
                     [](const TensorImpl& o) {
                       auto* gx = grad_of(o.node->inputs[0]);
                       if (!gx) return;
                       for (std::size_t i = 0; i < o.grad.size(); ++i) (*gx)[i] += o.grad[i];
                     });
}

Tensor cross_entropy(const Tensor& logits, std::span<const int> targets) {
  check_finite("cross_entropy", logits);
  if (logits.rank() != 2 || logits.dim(0) != targets.size()) {
    shape_fail("cross_entropy", "logits " + shape_string(logits.shape()) + " with " +
                                    std::to_string(targets.size()) + " targets");
  }
  const std::size_t batch = logits.dim(0), classes = logits.dim(1);
  auto lv = logits.values();
  std::vector<Real> probs(logits.numel());
  Real total = 0;
  for (std::size_t b = 0; b < batch; ++b) {
    const int t = targets[b];
    if (t < 0 || static_cast<std::size_t>(t) >= classes) {
      shape_fail("cross_entropy", "target " + std::to_string(t) + " outside " +
                                      std::to_string(classes) + " classes");
    }
    const Real* in = lv.data() + b * classes;
    Real* p = probs.data() + b * classes;
    const Real mx = *std::max_element(in, in + classes);
    Real z = 0;
    for (std::size_t c = 0; c < classes; ++c) z += (p[c] = std::exp(in[c] - mx));
    for (std::size_t c = 0; c < classes; ++c) p[c] /= z;
    total += (std::log(z) + mx) - in[t];
  }
  const Real inv_b = Real(1) / static_cast<Real>(batch);
  std::vector<int> saved(targets.begin(), targets.end());
  return make_output("cross_entropy", {1}, {total * inv_b}, {logits},
                     [batch, classes, inv_b, probs = std::move(probs),
                      saved = std::move(saved)](const TensorImpl& o) {
                       auto* gl = grad_of(o.node->inputs[0]);
                       if (!gl) return;
                       const Real g = o.grad[0] * inv_b;
                       for (std::size_t b = 0; b < batch; ++b) {
                         for (std::size_t c = 0; c < classes; ++c) {
                           const Real onehot = static_cast<int>(c) == saved[b] ? Real(1) : Real(0);
                           (*gl)[b * classes + c] += g * (probs[b * classes + c] - onehot);
                         }
                       }
                     });
}

Tensor gaussian_kl(const Tensor& mu_q, const Tensor& logvar_q, const Tensor& mu_p,
                   const Tensor& logvar_p) {
  for (const Tensor* t : {&mu_q, &logvar_q, &mu_p, &logvar_p}) check_finite("gaussian_kl", *t);
  if (logvar_q.shape() != mu_q.shape() || mu_p.shape() != mu_q.shape() ||
      logvar_p.shape() != mu_q.shape()) {
    shape_fail("gaussian_kl", "q " + shape_string(mu_q.shape()) + "/" +
                                  shape_string(logvar_q.shape()) + ", p " +
                                  shape_string(mu_p.shape()) + "/" +
                                  shape_string(logvar_p.shape()));
  }
  const std::size_t n = mu_q.numel();
  auto mq = mu_q.values(), lq = logvar_q.values(), mp = mu_p.values(), lp = logvar_p.values();
  double total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(lq[i]) - lp[i];
    const double dm = static_cast<double>(mq[i]) - mp[i];
    const double shape_term = std::max(0.0, std::expm1(x) - x);
    total += 0.5 * (shape_term + dm * dm * std::exp(-static_cast<double>(lp[i])));
  }
  return make_output("gaussian_kl", {1}, {static_cast<Real>(total)},
                     {mu_q, logvar_q, mu_p, logvar_p}, [n](const TensorImpl& o) {
                       const auto& in = o.node->inputs;
                       auto* gmq = grad_of(in[0]);
                       auto* glq = grad_of(in[1]);
                       auto* gmp = grad_of(in[2]);
                       auto* glp = grad_of(in[3]);
                       const double g = o.grad[0];
                       for (std::size_t i = 0; i < n; ++i) {
                         const double lq = in[1]->value[i], lp = in[3]->value[i];
                         const double dm = static_cast<double>(in[0]->value[i]) - in[2]->value[i];
                         const double inv_vp = std::exp(-lp);
                         const double ratio = std::exp(lq - lp);
                         if (gmq) (*gmq)[i] += static_cast<Real>(g * dm * inv_vp);
                         if (gmp) (*gmp)[i] -= static_cast<Real>(g * dm * inv_vp);
                         if (glq) (*glq)[i] += static_cast<Real>(g * 0.5 * (ratio - 1.0));
                         if (glp) {
                           (*glp)[i] += static_cast<Real>(g * 0.5 * (1.0 - ratio - dm * dm * inv_vp));
                         }
                       }
                     });
}

}  // namespace ops

std::vector<int> argmax_rows(const Tensor& x) {
  const std::size_t n = x.shape().back();
  const std::size_t rows = x.numel() / n;
  std::vector<int> out(rows);
  auto v = x.values();
  for (std::size_t r = 0; r < rows; ++r) {
    const Real* row = v.data() + r * n;
    out[r] = static_cast<int>(std::max_element(row, row + n) - row);
  }
  return out;
}

MKP_NAMESPACE_END
