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
#include "mkp/semantic.hpp"

#include "mkp/init.hpp"
#include "mkp/ops.hpp"

MKP_NAMESPACE_BEGIN

namespace {

SemanticHeads::Head make_head(std::size_t in_dim, std::size_t d_z, Rng& rng) {
  return {init::xavier(in_dim, d_z, rng), init::zeros({d_z}),
          init::xavier(d_z, d_z, rng),    init::zeros({d_z}),
          init::xavier(d_z, d_z, rng),    init::zeros({d_z})};
}

void append(std::vector<NamedTensor>& out, const std::string& prefix,
            const SemanticHeads::Head& h) {
  out.push_back({prefix + "w_z", h.w_z});
  out.push_back({prefix + "b_z", h.b_z});
  out.push_back({prefix + "w_mu", h.w_mu});
  out.push_back({prefix + "b_mu", h.b_mu});
  out.push_back({prefix + "w_sigma", h.w_sigma});
  out.push_back({prefix + "b_sigma", h.b_sigma});
}

}  // namespace

SemanticHeads::SemanticHeads(const SemanticConfig& config, Rng& init_rng)
    : config_(config) {
  if (config_.d_model == 0 || config_.d_label == 0 || config_.d_z == 0) {
    throw ConfigError("semantic config: dimensions must be positive");
  }
  posterior_ = make_head(config_.d_model + config_.d_label, config_.d_z, init_rng);
  prior_ = make_head(config_.d_model, config_.d_z, init_rng);
}

GaussianParams SemanticHeads::apply(const Head& head, const Tensor& input,
                                    std::size_t in_dim) const {
  if (input.rank() != 2 || input.dim(1) != in_dim) {
    throw ShapeError("semantic head expects [B, " + std::to_string(in_dim) + "], got " +
                     shape_string(input.shape()));
  }
  Tensor hidden = ops::tanh(ops::add(ops::matmul(input, head.w_z), head.b_z));
  Tensor mu = ops::add(ops::matmul(hidden, head.w_mu), head.b_mu);
  Tensor log_var = ops::add(ops::matmul(hidden, head.w_sigma), head.b_sigma);
  return {mu, ops::clamp(log_var, kLogVarMin, kLogVarMax)};
}

GaussianParams SemanticHeads::posterior(const Tensor& h_cls, const Tensor& h_y) const {
  if (h_cls.rank() != 2 || h_y.rank() != 2 || h_cls.dim(0) != h_y.dim(0) ||
      h_cls.dim(1) != config_.d_model || h_y.dim(1) != config_.d_label) {
    throw ShapeError("posterior: h_cls " + shape_string(h_cls.shape()) + ", h_y " +
                     shape_string(h_y.shape()) + " do not match d=" +
                     std::to_string(config_.d_model) +
                     ", d_label=" + std::to_string(config_.d_label));
  }
  return apply(posterior_, ops::concat({h_cls, h_y}), config_.d_model + config_.d_label);
}

GaussianParams SemanticHeads::prior(const Tensor& h_cls) const {
  return apply(prior_, h_cls, config_.d_model);
}

Tensor SemanticHeads::infer_latent(const Tensor& h_cls) const { return prior(h_cls).mu; }

std::vector<NamedTensor> SemanticHeads::parameters() const {
  std::vector<NamedTensor> out;
  append(out, "semantic.posterior.", posterior_);
  append(out, "semantic.prior.", prior_);
  return out;
}

LatentSample reparameterize(const GaussianParams& g, Rng& rng) {
  std::vector<Real> eps(g.mu.numel());
  for (Real& e : eps) e = static_cast<Real>(rng.normal());
  return reparameterize(g, std::move(eps));
}

LatentSample reparameterize(const GaussianParams& g, std::vector<Real> eps) {
  if (g.mu.shape() != g.log_var.shape() || eps.size() != g.mu.numel()) {
    throw ShapeError("reparameterize: mu " + shape_string(g.mu.shape()) + ", log_var " +
                     shape_string(g.log_var.shape()) + ", eps of " +
                     std::to_string(eps.size()));
  }
  Tensor noise = Tensor::from(g.mu.shape(), eps);
  Tensor sigma = ops::exp(ops::scale(g.log_var, Real(0.5)));
  return {ops::add(g.mu, ops::mul(sigma, noise)), std::move(eps)};
}

Tensor kl_closed_form(const GaussianParams& q, const GaussianParams& p) {
  return ops::gaussian_kl(q.mu, q.log_var, p.mu, p.log_var);
}

MKP_NAMESPACE_END
