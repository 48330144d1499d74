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
#ifndef MKP_OPS_HPP_
#define MKP_OPS_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "mkp/tensor.hpp"

MKP_NAMESPACE_BEGIN

// Differentiable primitives. Every primitive rejects NaN/Inf inputs with
// NumericError and incompatible shapes with ShapeError naming the op.
//
// Broadcasting: the second operand of add/sub/mul may either match the
// first exactly or equal its trailing dimensions (bias-style broadcast over
// the leading batch dimensions).
namespace ops {

// a: [..., k], b: [k, n] -> [..., n]
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, Real factor);

// Concatenation along the last axis; leading dimensions must agree.
Tensor concat(std::span<const Tensor> parts);
Tensor concat(std::initializer_list<Tensor> parts);

Tensor tanh(const Tensor& x);
Tensor exp(const Tensor& x);
// Requires strictly positive input.
Tensor log(const Tensor& x);
// tanh approximation, as in BERT.
Tensor gelu(const Tensor& x);
// Gradient passes where lo <= x <= hi, zero elsewhere.
Tensor clamp(const Tensor& x, Real lo, Real hi);

// Along the last axis.
Tensor softmax(const Tensor& x);

// Full reductions to shape [1].
Tensor sum(const Tensor& x);
Tensor mean(const Tensor& x);

// table: [V, d]; output shape = out_prefix + [d], numel(out_prefix) == ids.
Tensor embedding(const Tensor& table, std::span<const int> ids,
                 const Shape& out_prefix);
Tensor embedding(const Tensor& table, std::span<const int> ids);

// Normalizes over the last axis; gamma, beta: [n].
Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                  Real eps = Real(1e-5));

// Multi-head scaled dot-product attention.
// q: [B, Tq, d]; k, v: [B, Tk, d]; key_mask: B*Tk entries, nonzero = real
// token. Masked keys receive exactly zero weight. d must divide by heads.
Tensor attention(const Tensor& q, const Tensor& k, const Tensor& v,
                 std::span<const std::uint8_t> key_mask, std::size_t heads);

// x: [B, T, d] -> [B, d] at position t.
Tensor select_position(const Tensor& x, std::size_t t);
Tensor reshape(const Tensor& x, Shape shape);

// Sum over all elements of KL(N(mu_q, e^lv_q) || N(mu_p, e^lv_p)) for
// diagonal Gaussians; all four inputs share one shape. Per element:
//   0.5 * [(e^x - 1 - x) + (mu_q - mu_p)^2 e^-lv_p],  x = lv_q - lv_p,
// which is the usual closed form rearranged so identical inputs give
// exactly 0 and rounding never makes a term negative.
Tensor gaussian_kl(const Tensor& mu_q, const Tensor& logvar_q, const Tensor& mu_p,
                   const Tensor& logvar_p);

// Mean over the batch of -log softmax(logits)[target]. logits: [B, C].
Tensor cross_entropy(const Tensor& logits, std::span<const int> targets);

}  // namespace ops

// Row-wise argmax over the last axis; ties go to the lowest index.
std::vector<int> argmax_rows(const Tensor& x);

MKP_NAMESPACE_END

#endif  // MKP_OPS_HPP_
