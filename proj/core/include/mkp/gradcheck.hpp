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
#ifndef MKP_GRADCHECK_HPP_
#define MKP_GRADCHECK_HPP_

#include <functional>
#include <span>
#include <string>

#include "mkp/optim.hpp"
#include "mkp/tensor.hpp"

MKP_NAMESPACE_BEGIN

inline constexpr double kGradCheckFloor = 1e-5;

struct GradCheckResult {
  double max_rel_error = 0;
  std::string worst_param;
  std::size_t worst_index = 0;
  double worst_analytic = 0;
  double worst_numeric = 0;
  std::size_t coordinates = 0;
};

// Compares reverse-mode gradients of the scalar `f` against central
// differences with step `h`, over every coordinate of `params`. The error
// per coordinate is |a - n| / max(kGradCheckFloor, |a| + |n|); the floor
// keeps round-off on structurally zero gradients from reading as a
// relative error. `f` must rebuild its
// graph on each call and be deterministic (any noise frozen); two forward
// passes that disagree raise NumericError.
GradCheckResult grad_check(const std::function<Tensor()>& f,
                           std::span<const NamedTensor> params, double h);

// Single-input form: `x` is made a gradient leaf if it is not one already.
GradCheckResult grad_check(const std::function<Tensor(const Tensor&)>& f,
                           Tensor x, double h);

MKP_NAMESPACE_END

#endif  // MKP_GRADCHECK_HPP_
