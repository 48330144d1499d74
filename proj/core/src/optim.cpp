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
#include "mkp/optim.hpp"

#include <cmath>

MKP_NAMESPACE_BEGIN

void optimizer_step(std::span<const NamedTensor> params, OptimState& state) {
  for (const auto& p : params) {
    if (!p.tensor.has_grad()) {
      throw ConfigError("optimizer_step: parameter '" + p.name + "' has no gradient");
    }
  }
  for (const auto& p : params) {
    Tensor t = p.tensor;
    AdamSlot& slot = state.slots[p.name];
    if (slot.m.empty()) {
      slot.m.assign(t.numel(), Real(0));
      slot.v.assign(t.numel(), Real(0));
    } else if (slot.m.size() != t.numel()) {
      throw ShapeError("optimizer_step: slot size mismatch for '" + p.name + "'");
    }
    ++slot.step;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(slot.step));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(slot.step));
    auto g = t.grad();
    auto w = t.mutable_values();
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double gi = g[i];
      const double m = state.beta1 * slot.m[i] + (1.0 - state.beta1) * gi;
      const double v = state.beta2 * slot.v[i] + (1.0 - state.beta2) * gi * gi;
      slot.m[i] = static_cast<Real>(m);
      slot.v[i] = static_cast<Real>(v);
      const double update = state.lr * (m / bc1) / (std::sqrt(v / bc2) + state.eps);
      if (!std::isfinite(update)) {
        throw NumericError("optimizer_step: non-finite update for '" + p.name +
                           "' at index " + std::to_string(i));
      }
      w[i] = static_cast<Real>(w[i] - update);
    }
  }
  zero_grads(params);
}

double clip_grad_norm(std::span<const NamedTensor> params, double max_norm) {
  double sq = 0;
  for (const auto& p : params) {
    for (Real g : p.tensor.grad()) sq += static_cast<double>(g) * g;
  }
  const double norm = std::sqrt(sq);
  if (!std::isfinite(norm)) throw NumericError("clip_grad_norm: non-finite gradient norm");
  if (max_norm > 0 && norm > max_norm) {
    const double factor = max_norm / norm;
    for (const auto& p : params) {
      if (!p.tensor.has_grad()) continue;
      Tensor t = p.tensor;
      for (Real& g : t.mutable_grad()) g = static_cast<Real>(g * factor);
    }
  }
  return norm;
}

void zero_grads(std::span<const NamedTensor> params) {
  for (const auto& p : params) {
    Tensor t = p.tensor;
    t.zero_grad();
  }
}

MKP_NAMESPACE_END
