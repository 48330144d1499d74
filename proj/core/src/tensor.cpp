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
#include "mkp/tensor.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <unordered_set>
#include <utility>

MKP_NAMESPACE_BEGIN

namespace {
thread_local bool g_grad_enabled = true;
}  // namespace

std::size_t shape_numel(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

std::string shape_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ',';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

std::vector<Real>& TensorImpl::grad_buffer() {
  if (grad.empty()) grad.assign(value.size(), Real{0});
  return grad;
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  return full(std::move(shape), Real{0}, requires_grad);
}

Tensor Tensor::full(Shape shape, Real fill, bool requires_grad) {
  const std::size_t n = shape_numel(shape);
  return from(std::move(shape), std::vector<Real>(n, fill), requires_grad);
}

Tensor Tensor::from(Shape shape, std::vector<Real> values,
                    bool requires_grad) {
  for (std::size_t d : shape) {
    if (d == 0) throw ShapeError("tensor dimensions must be positive, got " +
                                 shape_string(shape));
  }
  if (shape_numel(shape) != values.size()) {
    throw ShapeError("tensor of shape " + shape_string(shape) + " needs " +
                     std::to_string(shape_numel(shape)) + " values, got " +
                     std::to_string(values.size()));
  }
  auto impl = std::make_shared<TensorImpl>();
  impl->shape = std::move(shape);
  impl->value = std::move(values);
  impl->requires_grad = requires_grad;
  return Tensor(std::move(impl));
}

Tensor Tensor::scalar(Real v, bool requires_grad) {
  return from({1}, {v}, requires_grad);
}

const Shape& Tensor::shape() const { return impl_->shape; }
std::size_t Tensor::dim(std::size_t i) const { return impl_->shape.at(i); }
std::size_t Tensor::numel() const { return impl_->value.size(); }
std::span<const Real> Tensor::values() const { return impl_->value; }
std::span<Real> Tensor::mutable_values() { return impl_->value; }

Real Tensor::item() const {
  if (numel() != 1) {
    throw ShapeError("item() on tensor of shape " + shape_string(shape()));
  }
  return impl_->value[0];
}

bool Tensor::requires_grad() const { return impl_->requires_grad; }
bool Tensor::has_grad() const { return !impl_->grad.empty(); }
std::span<const Real> Tensor::grad() const { return impl_->grad; }
std::span<Real> Tensor::mutable_grad() { return impl_->grad_buffer(); }
void Tensor::zero_grad() {
  impl_->grad.clear();
  impl_->grad.shrink_to_fit();
}
bool Tensor::has_node() const { return impl_->node != nullptr; }

Tensor Tensor::clone() const {
  return from(impl_->shape, impl_->value, impl_->requires_grad);
}

Tensor Tensor::detach() const { return from(impl_->shape, impl_->value); }

void Tensor::backward() const { mkp::backward(*this); }

namespace {

// Iterative post-order DFS; result is a topological order (inputs first).
std::vector<TensorImpl*> topo_order(TensorImpl* root) {
  std::vector<TensorImpl*> order;
  std::unordered_set<TensorImpl*> visited;
  std::vector<std::pair<TensorImpl*, std::size_t>> stack;
  stack.emplace_back(root, 0);
  visited.insert(root);
  while (!stack.empty()) {
    auto& [t, next] = stack.back();
    if (t->node && next < t->node->inputs.size()) {
      TensorImpl* child = t->node->inputs[next++].get();
      if (child->node && visited.insert(child).second) {
        stack.emplace_back(child, 0);
      }
      continue;
    }
    order.push_back(t);
    stack.pop_back();
  }
  return order;
}

}  // namespace

void backward(const Tensor& loss) {
  if (!loss.defined()) throw ConfigError("backward on undefined tensor");
  if (loss.numel() != 1) {
    throw ShapeError("backward requires a scalar loss, got shape " +
                     shape_string(loss.shape()));
  }
  TensorImpl* root = loss.impl().get();
  if (!root->node) {
    throw ConfigError("backward on a tensor with no recorded graph");
  }
  root->grad_buffer()[0] += Real{1};
  const auto order = topo_order(root);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    TensorImpl* t = *it;
    if (t->grad.empty()) continue;  // no gradient flowed here
    t->node->backward(*t);
    // Intermediate gradients are not retained; a later backward through a
    // shared subgraph must not see them again.
    t->grad.clear();
  }
}

std::size_t graph_size(const Tensor& t) {
  if (!t.defined() || !t.has_node()) return 0;
  return topo_order(t.impl().get()).size();
}

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) {
  g_grad_enabled = false;
}
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

bool grad_recording_enabled() { return g_grad_enabled; }

MKP_NAMESPACE_END
