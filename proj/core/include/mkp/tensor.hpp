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
#ifndef MKP_TENSOR_HPP_
#define MKP_TENSOR_HPP_

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mkp/common.hpp"

MKP_NAMESPACE_BEGIN

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_string(const Shape& shape);

struct TensorImpl;

// A recorded primitive application. Holds its inputs and a closure that
// reads the output gradient and accumulates into the inputs' gradients.
struct Node {
  std::string_view op;
  std::vector<std::shared_ptr<TensorImpl>> inputs;
  std::function<void(const TensorImpl& out)> backward;
};

struct TensorImpl {
  Shape shape;
  std::vector<Real> value;
  std::vector<Real> grad;  // empty until first accumulation
  bool requires_grad = false;
  std::shared_ptr<Node> node;  // producer; null for leaves

  // Allocates (zero-filled) on first use.
  std::vector<Real>& grad_buffer();
};

// Handle to a dense row-major tensor. Copies share storage; use clone()
// for an independent copy.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, Real fill, bool requires_grad = false);
  static Tensor from(Shape shape, std::vector<Real> values,
                     bool requires_grad = false);
  static Tensor scalar(Real v, bool requires_grad = false);

  bool defined() const { return impl_ != nullptr; }
  const Shape& shape() const;
  std::size_t dim(std::size_t i) const;
  std::size_t rank() const { return shape().size(); }
  std::size_t numel() const;

  std::span<const Real> values() const;
  std::span<Real> mutable_values();
  Real item() const;
  Real at(std::size_t flat_index) const { return values()[flat_index]; }

  bool requires_grad() const;
  bool has_grad() const;
  std::span<const Real> grad() const;
  std::span<Real> mutable_grad();
  void zero_grad();

  // True if produced by a recorded primitive.
  bool has_node() const;

  // Deep copy of values; the copy is a fresh leaf.
  Tensor clone() const;
  // Same values, detached from the graph.
  Tensor detach() const;

  // Reverse-mode pass from this scalar.
  void backward() const;

  bool same_storage(const Tensor& other) const { return impl_ == other.impl_; }

  const std::shared_ptr<TensorImpl>& impl() const { return impl_; }
  explicit Tensor(std::shared_ptr<TensorImpl> impl) : impl_(std::move(impl)) {}

 private:
  std::shared_ptr<TensorImpl> impl_;
};

// Computes d(loss)/d(leaf) for every requires-grad tensor reachable from
// `loss`, visiting each recorded node once in reverse topological order.
// Gradients accumulate across calls.
void backward(const Tensor& loss);

// Number of nodes reachable from `t`.
std::size_t graph_size(const Tensor& t);

// Disables graph recording on the current thread while alive.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

bool grad_recording_enabled();

MKP_NAMESPACE_END

#endif  // MKP_TENSOR_HPP_
