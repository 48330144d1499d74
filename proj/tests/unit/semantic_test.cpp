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
#include <gtest/gtest.h>

#include <cmath>

#include "mkp/ops.hpp"
#include "mkp/semantic.hpp"

namespace mkp {
namespace {

void zero(SemanticHeads::Head& h) {
  for (Tensor* t : {&h.w_z, &h.b_z, &h.w_mu, &h.b_mu, &h.w_sigma, &h.b_sigma}) {
    for (Real& v : t->mutable_values()) v = 0;
  }
}

GaussianParams gaussian(std::vector<Real> mu, std::vector<Real> lv) {
  const std::size_t n = mu.size();
  return {Tensor::from({1, n}, std::move(mu)), Tensor::from({1, n}, std::move(lv))};
}

// Independent oracle: the closed form written out per dimension in double.
double kl_oracle(double mq, double vq, double mp, double vp) {
  return 0.5 * (std::log(vp) - std::log(vq)) + (vq + (mq - mp) * (mq - mp)) / (2 * vp) - 0.5;
}

class SemanticTest : public ::testing::Test {
 protected:
  SemanticTest() : rng_(3), heads_(SemanticConfig{6, 4, 3}, rng_) {}
  Tensor random(Shape s, std::uint64_t seed) {
    Rng r(seed);
    std::vector<Real> v(shape_numel(s));
    for (Real& x : v) x = static_cast<Real>(r.normal());
    return Tensor::from(std::move(s), std::move(v));
  }
  Rng rng_;
  SemanticHeads heads_;
};

TEST_F(SemanticTest, ZeroWeightsGiveStandardNormal) {
  zero(heads_.posterior_head());
  zero(heads_.prior_head());
  const auto post = heads_.posterior(random({2, 6}, 1), random({2, 4}, 2));
  const auto prior = heads_.prior(random({2, 6}, 1));
  for (const auto* g : {&post, &prior}) {
    for (Real v : g->mu.values()) EXPECT_EQ(v, 0);
    for (Real v : g->log_var.values()) EXPECT_EQ(v, 0);
  }
  const Tensor latent = heads_.infer_latent(random({2, 6}, 1));
  for (Real v : latent.values()) EXPECT_EQ(v, 0);
}

TEST_F(SemanticTest, OutputDims) {
  const auto post = heads_.posterior(random({5, 6}, 1), random({5, 4}, 2));
  EXPECT_EQ(post.mu.shape(), (Shape{5, 3}));
  EXPECT_EQ(post.log_var.shape(), (Shape{5, 3}));
  EXPECT_THROW(heads_.posterior(random({5, 6}, 1), random({5, 5}, 2)), ShapeError);
  EXPECT_THROW(heads_.prior(random({5, 4}, 1)), ShapeError);
}

TEST_F(SemanticTest, LogVarClamped) {
  for (Real& v : heads_.prior_head().b_sigma.mutable_values()) v = 50;
  const GaussianParams prior = heads_.prior(random({2, 6}, 1));
  for (Real v : prior.log_var.values()) EXPECT_LE(v, kLogVarMax);
}

TEST_F(SemanticTest, InferLatentIsPriorMeanAndDeterministic) {
  const Tensor h = random({3, 6}, 4);
  const Tensor z1 = heads_.infer_latent(h), z2 = heads_.infer_latent(h);
  const auto prior = heads_.prior(h);
  // Prior path reparameterized with eps = 0.
  const auto zero_eps = reparameterize(prior, std::vector<Real>(9, 0)).h_z;
  for (std::size_t i = 0; i < 9; ++i) {
    EXPECT_EQ(z1.at(i), z2.at(i));
    EXPECT_EQ(z1.at(i), prior.mu.at(i));
    EXPECT_EQ(z1.at(i), zero_eps.at(i));
  }
}

TEST(Reparameterize, Examples) {
  auto s = reparameterize(gaussian({1, 2}, {0, 0}), std::vector<Real>{0, 0});
  EXPECT_FLOAT_EQ(s.h_z.at(0), 1);
  EXPECT_FLOAT_EQ(s.h_z.at(1), 2);
  s = reparameterize(gaussian({0}, {static_cast<Real>(std::log(4.0))}), std::vector<Real>{0.5});
  EXPECT_NEAR(s.h_z.at(0), 1.0, 1e-6);
  EXPECT_THROW(reparameterize(gaussian({0}, {0}), std::vector<Real>{0, 1}), ShapeError);
}

TEST(Reparameterize, RecordsEpsAndIdentityHoldsExactly) {
  Rng rng(8);
  const auto g = gaussian({0.5, -1}, {0.3f, -0.7f});
  const auto s = reparameterize(g, rng);
  ASSERT_EQ(s.eps.size(), 2u);
  const auto replay = reparameterize(g, s.eps);
  EXPECT_EQ(replay.h_z.at(0), s.h_z.at(0));
  EXPECT_EQ(replay.h_z.at(1), s.h_z.at(1));
}

TEST(KlClosedForm, OracleValues) {
  EXPECT_NEAR(kl_closed_form(gaussian({1}, {0}), gaussian({0}, {0})).item(), 0.5, 1e-6);
  const Real ln4 = static_cast<Real>(std::log(4.0));
  EXPECT_NEAR(kl_closed_form(gaussian({0}, {ln4}), gaussian({0}, {0})).item(), kl_oracle(0, 4, 0, 1), 1e-5);
  EXPECT_NEAR(kl_oracle(0, 4, 0, 1), 0.806853, 1e-6);
  EXPECT_LT(kl_closed_form(gaussian({0.3f, -2}, {1.5f, -0.25f}), gaussian({0.3f, -2}, {1.5f, -0.25f})).item(), 1e-8);
}

TEST(KlClosedForm, NonNegativeAndMatchesOracleOnRandomInputs) {
  Rng rng(12);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<Real> mq(3), lq(3), mp(3), lp(3);
    double want = 0;
    for (int i = 0; i < 3; ++i) {
      mq[i] = static_cast<Real>(rng.normal() * 2);
      mp[i] = static_cast<Real>(rng.normal() * 2);
      lq[i] = static_cast<Real>(rng.normal() * 2);
      lp[i] = static_cast<Real>(rng.normal() * 2);
      want += kl_oracle(mq[i], std::exp(double(lq[i])), mp[i], std::exp(double(lp[i])));
    }
    const double got = kl_closed_form(gaussian(mq, lq), gaussian(mp, lp)).item();
    ASSERT_GE(got, 0);
    ASSERT_NEAR(got, want, 1e-4 * std::max(1.0, want));
  }
}

TEST(KlClosedForm, DimensionMismatch) {
  EXPECT_THROW(kl_closed_form(gaussian({0, 0}, {0, 0}), gaussian({0}, {0})), ShapeError);
}

}  // namespace
}  // namespace mkp
