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
#include "mkp/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

MKP_NAMESPACE_BEGIN

namespace {

double eval_scalar(const std::function<Tensor()>& f) {
  NoGradGuard guard;
  Tensor y = f();
  if (y.numel() != 1) {
    throw ShapeError("grad_check: function must return a scalar, got " +
                     shape_string(y.shape()));
  }
  return static_cast<double>(y.item());
}

}  // namespace

GradCheckResult grad_check(const std::function<Tensor()>& f,
                           std::span<const NamedTensor> params, double h) {
  if (!(h > 0)) throw ConfigError("grad_check: step must be positive");
  zero_grads(params);
  Tensor loss = f();
  if (loss.numel() != 1) {
    throw ShapeError("grad_check: function must return a scalar, got " +
                     shape_string(loss.shape()));
  }
  const double replay = eval_scalar(f);
  if (replay != static_cast<double>(loss.item())) {
    throw NumericError("grad_check: function is not deterministic");
  }
  backward(loss);

  GradCheckResult result;
  for (const auto& p : params) {
    Tensor t = p.tensor;
    std::vector<Real> analytic(t.numel(), Real(0));
    if (t.has_grad()) {
      std::copy(t.grad().begin(), t.grad().end(), analytic.begin());
    }
    auto w = t.mutable_values();
    for (std::size_t i = 0; i < w.size(); ++i) {
      const Real saved = w[i];
      w[i] = static_cast<Real>(saved + h);
      const double fp = eval_scalar(f);
      w[i] = static_cast<Real>(saved - h);
      const double fm = eval_scalar(f);
      w[i] = saved;
      const double numeric = (fp - fm) / (2.0 * h);
      const double a = analytic[i];
      const double err =
          std::abs(a - numeric) / std::max(kGradCheckFloor, std::abs(a) + std::abs(numeric));
      ++result.coordinates;
      if (err > result.max_rel_error || result.coordinates == 1) {
        result.max_rel_error = err;
        result.worst_param = p.name;
        result.worst_index = i;
        result.worst_analytic = a;
        result.worst_numeric = numeric;
      }
    }
  }
  zero_grads(params);
  return result;
}

GradCheckResult grad_check(const std::function<Tensor(const Tensor&)>& f, Tensor x,
                           double h) {
  if (!x.requires_grad()) {
    x = Tensor::from(x.shape(), std::vector<Real>(x.values().begin(), x.values().end()),
                     true);
  }
  const NamedTensor named{"x", x};
  return grad_check([&] { return f(x); }, std::span<const NamedTensor>(&named, 1), h);
}

MKP_NAMESPACE_END
