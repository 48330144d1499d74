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
#ifndef MKP_OPTIM_HPP_
#define MKP_OPTIM_HPP_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mkp/tensor.hpp"

MKP_NAMESPACE_BEGIN

struct NamedTensor {
  std::string name;
  Tensor tensor;
};

struct AdamSlot {
  std::vector<Real> m;
  std::vector<Real> v;
  std::int64_t step = 0;
};

// Adam state. Slots are keyed by parameter name and carry their own step
// counter, so updates on disjoint parameter subsets commute.
struct OptimState {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::map<std::string, AdamSlot> slots;
};

// One Adam update over `params`; their gradients are released afterwards.
// Parameters outside `params` are never touched. Throws ConfigError when a
// parameter has no gradient and NumericError if an update is not finite.
void optimizer_step(std::span<const NamedTensor> params, OptimState& state);

// Scales gradients so their global L2 norm is at most `max_norm`. Returns
// the norm before scaling. Parameters without gradients are skipped.
double clip_grad_norm(std::span<const NamedTensor> params, double max_norm);

void zero_grads(std::span<const NamedTensor> params);

MKP_NAMESPACE_END

#endif  // MKP_OPTIM_HPP_
