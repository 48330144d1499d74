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
#ifndef MKP_ENCODER_HPP_
#define MKP_ENCODER_HPP_

#include <span>
#include <string>
#include <vector>

#include "mkp/optim.hpp"
#include "mkp/rng.hpp"
#include "mkp/tensor.hpp"
#include "mkp/vocab.hpp"

MKP_NAMESPACE_BEGIN

struct EncoderConfig {
  std::size_t layers = 2;
  std::size_t heads = 4;
  std::size_t d_model = 64;
  std::size_t max_len = 64;
  std::size_t vocab_size = 0;

  std::size_t d_ff() const { return 4 * d_model; }
  void validate() const;
};

// Token adaptor: a post-layer-norm transformer encoder. The input
// representation of each position is the sum of its token, segment and
// position embeddings.
class Encoder {
 public:
  struct Layer {
    Tensor wq, bq, wk, bk, wv, bv, wo, bo;
    Tensor ln1_gain, ln1_bias;
    Tensor w1, b1, w2, b2;
    Tensor ln2_gain, ln2_bias;
  };

  Encoder(const EncoderConfig& config, Rng& init_rng);

  const EncoderConfig& config() const { return config_; }

  // Final-layer hidden state at the [CLS] position, [B, d]. Sequences of
  // different lengths are padded internally; padding never affects output.
  Tensor encode(std::span<const TokenizedPair> batch) const;

  std::vector<NamedTensor> parameters() const;

 private:
  EncoderConfig config_;
  Tensor token_embedding_, segment_embedding_, position_embedding_;
  Tensor emb_ln_gain_, emb_ln_bias_;
  std::vector<Layer> layers_;
};

MKP_NAMESPACE_END

#endif  // MKP_ENCODER_HPP_
