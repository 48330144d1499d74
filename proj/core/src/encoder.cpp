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
#include "mkp/encoder.hpp"

#include <algorithm>

#include "mkp/init.hpp"
#include "mkp/ops.hpp"

MKP_NAMESPACE_BEGIN

void EncoderConfig::validate() const {
  if (layers == 0 || heads == 0 || d_model == 0 || max_len < 5 || vocab_size < 4) {
    throw ConfigError("encoder config: layers, heads, d_model must be positive, "
                      "max_len >= 5 and vocab_size >= 4");
  }
  if (d_model % heads != 0) {
    throw ConfigError("encoder config: d_model " + std::to_string(d_model) +
                      " not divisible by heads " + std::to_string(heads));
  }
}

Encoder::Encoder(const EncoderConfig& config, Rng& init_rng) : config_(config) {
  config_.validate();
  const std::size_t d = config_.d_model;
  constexpr double kEmbStd = 0.02;
  token_embedding_ = init::normal({config_.vocab_size, d}, kEmbStd, init_rng);
  segment_embedding_ = init::normal({2, d}, kEmbStd, init_rng);
  position_embedding_ = init::normal({config_.max_len, d}, kEmbStd, init_rng);
  emb_ln_gain_ = init::ones({d});
  emb_ln_bias_ = init::zeros({d});
  for (std::size_t l = 0; l < config_.layers; ++l) {
    Layer layer;
    layer.wq = init::xavier(d, d, init_rng);
    layer.bq = init::zeros({d});
    layer.wk = init::xavier(d, d, init_rng);
    layer.bk = init::zeros({d});
    layer.wv = init::xavier(d, d, init_rng);
    layer.bv = init::zeros({d});
    layer.wo = init::xavier(d, d, init_rng);
    layer.bo = init::zeros({d});
    layer.ln1_gain = init::ones({d});
    layer.ln1_bias = init::zeros({d});
    layer.w1 = init::xavier(d, config_.d_ff(), init_rng);
    layer.b1 = init::zeros({config_.d_ff()});
    layer.w2 = init::xavier(config_.d_ff(), d, init_rng);
    layer.b2 = init::zeros({d});
    layer.ln2_gain = init::ones({d});
    layer.ln2_bias = init::zeros({d});
    layers_.push_back(std::move(layer));
  }
}

Tensor Encoder::encode(std::span<const TokenizedPair> batch) const {
  if (batch.empty()) throw ShapeError("encode: empty batch");
  std::size_t len = 0;
  for (const auto& p : batch) len = std::max(len, p.size());
  if (len > config_.max_len) {
    throw ShapeError("encode: sequence of length " + std::to_string(len) +
                     " exceeds position table of " + std::to_string(config_.max_len));
  }
  const std::size_t bsz = batch.size(), d = config_.d_model;
  std::vector<int> tokens, segments, positions;
  std::vector<std::uint8_t> mask;
  tokens.reserve(bsz * len);
  for (const auto& p : batch) {
    TokenizedPair padded = p;
    padded.pad_to(len);
    tokens.insert(tokens.end(), padded.token_ids.begin(), padded.token_ids.end());
    segments.insert(segments.end(), padded.segment_ids.begin(), padded.segment_ids.end());
    positions.insert(positions.end(), padded.position_ids.begin(), padded.position_ids.end());
    mask.insert(mask.end(), padded.attention_mask.begin(), padded.attention_mask.end());
  }
  const Shape prefix{bsz, len};
  Tensor x = ops::add(ops::add(ops::embedding(token_embedding_, tokens, prefix),
                               ops::embedding(segment_embedding_, segments, prefix)),
                      ops::embedding(position_embedding_, positions, prefix));
  x = ops::layer_norm(x, emb_ln_gain_, emb_ln_bias_);

  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const Layer& layer = layers_[l];
    // Only the [CLS] query is needed from the last layer.
    const bool last = l + 1 == layers_.size();
    Tensor query_in = last ? ops::reshape(ops::select_position(x, 0), {bsz, 1, d}) : x;
    Tensor q = ops::add(ops::matmul(query_in, layer.wq), layer.bq);
    Tensor k = ops::add(ops::matmul(x, layer.wk), layer.bk);
    Tensor v = ops::add(ops::matmul(x, layer.wv), layer.bv);
    Tensor attn = ops::attention(q, k, v, mask, config_.heads);
    attn = ops::add(ops::matmul(attn, layer.wo), layer.bo);
    Tensor h = ops::layer_norm(ops::add(query_in, attn), layer.ln1_gain, layer.ln1_bias);
    Tensor ff = ops::gelu(ops::add(ops::matmul(h, layer.w1), layer.b1));
    ff = ops::add(ops::matmul(ff, layer.w2), layer.b2);
    x = ops::layer_norm(ops::add(h, ff), layer.ln2_gain, layer.ln2_bias);
  }
  return ops::reshape(x, {bsz, d});
}

std::vector<NamedTensor> Encoder::parameters() const {
  std::vector<NamedTensor> out{
      {"bert.embeddings.token", token_embedding_},
      {"bert.embeddings.segment", segment_embedding_},
      {"bert.embeddings.position", position_embedding_},
      {"bert.embeddings.ln.gain", emb_ln_gain_},
      {"bert.embeddings.ln.bias", emb_ln_bias_},
  };
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const Layer& y = layers_[l];
    const std::string p = "bert.layer" + std::to_string(l) + ".";
    out.push_back({p + "attn.wq", y.wq});
    out.push_back({p + "attn.bq", y.bq});
    out.push_back({p + "attn.wk", y.wk});
    out.push_back({p + "attn.bk", y.bk});
    out.push_back({p + "attn.wv", y.wv});
    out.push_back({p + "attn.bv", y.bv});
    out.push_back({p + "attn.wo", y.wo});
    out.push_back({p + "attn.bo", y.bo});
    out.push_back({p + "ln1.gain", y.ln1_gain});
    out.push_back({p + "ln1.bias", y.ln1_bias});
    out.push_back({p + "ffn.w1", y.w1});
    out.push_back({p + "ffn.b1", y.b1});
    out.push_back({p + "ffn.w2", y.w2});
    out.push_back({p + "ffn.b2", y.b2});
    out.push_back({p + "ln2.gain", y.ln2_gain});
    out.push_back({p + "ln2.bias", y.ln2_bias});
  }
  return out;
}

MKP_NAMESPACE_END
