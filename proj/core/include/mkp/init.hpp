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
#ifndef MKP_INIT_HPP_
#define MKP_INIT_HPP_

#include <cmath>
#include <vector>

#include "mkp/rng.hpp"
#include "mkp/tensor.hpp"

MKP_NAMESPACE_BEGIN

namespace init {

inline Tensor normal(Shape shape, double stddev, Rng& rng) {
  std::vector<Real> v(shape_numel(shape));
  for (Real& x : v) x = static_cast<Real>(rng.normal() * stddev);
  return Tensor::from(std::move(shape), std::move(v), true);
}

// Glorot uniform for an [in, out] weight.
inline Tensor xavier(std::size_t in, std::size_t out, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(in + out));
  std::vector<Real> v(in * out);
  for (Real& x : v) x = static_cast<Real>((2.0 * rng.uniform() - 1.0) * bound);
  return Tensor::from({in, out}, std::move(v), true);
}

inline Tensor zeros(Shape shape) { return Tensor::zeros(std::move(shape), true); }
inline Tensor ones(Shape shape) { return Tensor::full(std::move(shape), Real(1), true); }

}  // namespace init

MKP_NAMESPACE_END

#endif  // MKP_INIT_HPP_
