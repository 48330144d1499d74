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
#ifndef MKP_SEMANTIC_HPP_
#define MKP_SEMANTIC_HPP_

#include <vector>

#include "mkp/optim.hpp"
#include "mkp/rng.hpp"
#include "mkp/tensor.hpp"

MKP_NAMESPACE_BEGIN

inline constexpr Real kLogVarMin = -8;
inline constexpr Real kLogVarMax = 8;

// Diagonal Gaussian, rows = instances: mu and log_var are [B, d_z].
struct GaussianParams {
  Tensor mu;
  Tensor log_var;
};

struct LatentSample {
  Tensor h_z;             // mu + exp(log_var / 2) * eps
  std::vector<Real> eps;  // the standard-normal draw, row-major [B, d_z]
};

struct SemanticConfig {
  std::size_t d_model = 64;
  std::size_t d_label = 32;
  std::size_t d_z = 32;
};

// Semantic adaptor heads. The posterior q(h_z | h_cls, h_y) and the prior
// p(h_z | h_cls) have the same form and independent parameters:
//   h' = tanh(W_z [input] + b_z),  mu = W_mu h' + b_mu,
//   log_var = clamp(W_sigma h' + b_sigma, -8, 8).
class SemanticHeads {
 public:
  struct Head {
    Tensor w_z, b_z, w_mu, b_mu, w_sigma, b_sigma;
  };

  SemanticHeads(const SemanticConfig& config, Rng& init_rng);

  const SemanticConfig& config() const { return config_; }

  GaussianParams posterior(const Tensor& h_cls, const Tensor& h_y) const;
  GaussianParams prior(const Tensor& h_cls) const;
  // Test-time latent: the prior mean. No randomness.
  Tensor infer_latent(const Tensor& h_cls) const;

  Head& posterior_head() { return posterior_; }
  Head& prior_head() { return prior_; }

  std::vector<NamedTensor> parameters() const;

 private:
  GaussianParams apply(const Head& head, const Tensor& input, std::size_t in_dim) const;

  SemanticConfig config_;
  Head posterior_;
  Head prior_;
};

// Draws eps ~ N(0, I) from `rng`, row-major.
LatentSample reparameterize(const GaussianParams& g, Rng& rng);
// Uses the given eps (size must equal mu's).
LatentSample reparameterize(const GaussianParams& g, std::vector<Real> eps);

// KL(q || p) summed over latent dimensions and rows.
Tensor kl_closed_form(const GaussianParams& q, const GaussianParams& p);

MKP_NAMESPACE_END

#endif  // MKP_SEMANTIC_HPP_
