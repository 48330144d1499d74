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
#ifndef MKP_COARSE_HPP_
#define MKP_COARSE_HPP_

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mkp/optim.hpp"
#include "mkp/rng.hpp"
#include "mkp/tensor.hpp"

MKP_NAMESPACE_BEGIN

// Top-level relation classes shared by event and discourse relations.
enum class CoarseLabel : int {
  kTemporal = 0,
  kContingency = 1,
  kComparison = 2,
  kExpansion = 3,
};

inline constexpr std::size_t kNumCoarse = 4;
inline constexpr std::array<std::string_view, kNumCoarse> kCoarseNames = {
    "Temporal", "Contingency", "Comparison", "Expansion"};

std::string_view coarse_name(CoarseLabel label);
std::optional<CoarseLabel> parse_coarse(std::string_view name);

// Coarse category adaptor: a 4-way linear classifier over [h_cls; h_z]
// (or h_cls alone when no latent is used) and a 4 x d_c label table.
class CoarseHeads {
 public:
  CoarseHeads(std::size_t input_dim, std::size_t d_coarse, Rng& init_rng);

  std::size_t input_dim() const { return input_dim_; }
  std::size_t embedding_dim() const { return table_.dim(1); }

  // Logits [B, 4]. `h_z` may be undefined when the heads were built for
  // h_cls alone.
  Tensor logits(const Tensor& h_cls, const Tensor& h_z) const;
  // Softmax of logits.
  Tensor classify(const Tensor& h_cls, const Tensor& h_z) const;

  // Rows of the label table, [B, d_c]. Throws ShapeError on an id outside 0..3.
  Tensor embed(std::span<const int> labels) const;
  Tensor embed(CoarseLabel label) const;

  Tensor& weight() { return weight_; }
  Tensor& bias() { return bias_; }
  Tensor& table() { return table_; }

  std::vector<NamedTensor> parameters() const;

 private:
  std::size_t input_dim_;
  Tensor weight_, bias_, table_;
};

MKP_NAMESPACE_END

#endif  // MKP_COARSE_HPP_
