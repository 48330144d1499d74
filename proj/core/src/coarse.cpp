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
#include "mkp/coarse.hpp"

#include "mkp/init.hpp"
#include "mkp/ops.hpp"

MKP_NAMESPACE_BEGIN

std::string_view coarse_name(CoarseLabel label) {
  return kCoarseNames.at(static_cast<std::size_t>(label));
}

std::optional<CoarseLabel> parse_coarse(std::string_view name) {
  for (std::size_t i = 0; i < kNumCoarse; ++i) {
    if (kCoarseNames[i] == name) return static_cast<CoarseLabel>(i);
  }
  return std::nullopt;
}

CoarseHeads::CoarseHeads(std::size_t input_dim, std::size_t d_coarse, Rng& init_rng)
    : input_dim_(input_dim) {
  if (input_dim == 0 || d_coarse == 0) throw ConfigError("coarse heads: dimensions must be positive");
  weight_ = init::xavier(input_dim, kNumCoarse, init_rng);
  bias_ = init::zeros({kNumCoarse});
  table_ = init::normal({kNumCoarse, d_coarse}, 0.02, init_rng);
}

Tensor CoarseHeads::logits(const Tensor& h_cls, const Tensor& h_z) const {
  Tensor input = h_z.defined() ? ops::concat({h_cls, h_z}) : h_cls;
  if (input.rank() != 2 || input.dim(1) != input_dim_) {
    throw ShapeError("classify_coarse: input " + shape_string(input.shape()) +
                     " does not match classifier width " + std::to_string(input_dim_));
  }
  return ops::add(ops::matmul(input, weight_), bias_);
}

Tensor CoarseHeads::classify(const Tensor& h_cls, const Tensor& h_z) const {
  return ops::softmax(logits(h_cls, h_z));
}

Tensor CoarseHeads::embed(std::span<const int> labels) const {
  return ops::embedding(table_, labels);
}

Tensor CoarseHeads::embed(CoarseLabel label) const {
  const int id = static_cast<int>(label);
  return ops::embedding(table_, std::span<const int>(&id, 1));
}

std::vector<NamedTensor> CoarseHeads::parameters() const {
  return {{"coarse.classifier.weight", weight_},
          {"coarse.classifier.bias", bias_},
          {"coarse.label_embedding", table_}};
}

MKP_NAMESPACE_END
