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

#include "mkp/checkpoint.hpp"
#include "mkp/optim.hpp"
#include "test_util.hpp"

namespace mkp {
namespace {

TEST(Adam, FirstStepMovesByLearningRate) {
  Tensor w = Tensor::from({2}, {1, -1}, true);
  w.mutable_grad()[0] = 0.5;
  w.mutable_grad()[1] = -2;
  OptimState st;
  st.lr = 0.1;
  std::vector<NamedTensor> params{{"w", w}};
  optimizer_step(params, st);
  // Bias-corrected first step: m_hat / sqrt(v_hat) = sign(g).
  EXPECT_NEAR(w.at(0), 1 - 0.1, 1e-6);
  EXPECT_NEAR(w.at(1), -1 + 0.1, 1e-6);
  EXPECT_FALSE(w.has_grad());
  EXPECT_EQ(st.slots.at("w").step, 1);
}

TEST(Adam, SecondStepMatchesHandOracle) {
  Tensor w = Tensor::from({1}, {0}, true);
  OptimState st;
  std::vector<NamedTensor> params{{"w", w}};
  const double g[] = {1.0, 3.0};
  double m = 0, v = 0, x = 0;
  for (int t = 1; t <= 2; ++t) {
    w.mutable_grad()[0] = static_cast<Real>(g[t - 1]);
    optimizer_step(params, st);
    m = 0.9 * m + 0.1 * g[t - 1];
    v = 0.999 * v + 0.001 * g[t - 1] * g[t - 1];
    x -= 1e-3 * (m / (1 - std::pow(0.9, t))) / (std::sqrt(v / (1 - std::pow(0.999, t))) + 1e-8);
  }
  EXPECT_NEAR(w.at(0), x, 1e-7);
}

TEST(Adam, MissingGradientIsAnError) {
  Tensor w = Tensor::from({1}, {0}, true);
  OptimState st;
  std::vector<NamedTensor> params{{"w", w}};
  EXPECT_THROW(optimizer_step(params, st), ConfigError);
}

TEST(Clip, ScalesToMaxNorm) {
  Tensor a = Tensor::from({1}, {0}, true);
  Tensor b = Tensor::from({1}, {0}, true);
  a.mutable_grad()[0] = 3;
  b.mutable_grad()[0] = 4;
  std::vector<NamedTensor> params{{"a", a}, {"b", b}};
  EXPECT_DOUBLE_EQ(clip_grad_norm(params, 1.0), 5.0);
  EXPECT_NEAR(a.grad()[0], 0.6, 1e-6);
  EXPECT_NEAR(b.grad()[0], 0.8, 1e-6);
  EXPECT_NEAR(clip_grad_norm(params, 10.0), 1.0, 1e-6);
  EXPECT_NEAR(a.grad()[0], 0.6, 1e-6);
}

TEST(Checkpoint, RoundTripsBitwise) {
  const auto dir = testing::scratch_dir("checkpoint_roundtrip");
  Tensor a = Tensor::from({2, 2}, {1.5f, -2.25f, 3.125f, 1e-7f}, true);
  Tensor b = Tensor::from({3}, {0, 1, 2}, true);
  std::vector<NamedTensor> params{{"a", a}, {"b", b}};
  save_checkpoint(dir, params);
  Tensor a2 = Tensor::zeros({2, 2}, true), b2 = Tensor::zeros({3}, true);
  std::vector<NamedTensor> loaded{{"a", a2}, {"b", b2}};
  load_checkpoint(dir, loaded);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(a.at(i), a2.at(i));
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(b.at(i), b2.at(i));
}

TEST(Checkpoint, RejectsMismatchedLayout) {
  const auto dir = testing::scratch_dir("checkpoint_mismatch");
  Tensor a = Tensor::zeros({2, 2}, true);
  std::vector<NamedTensor> params{{"a", a}};
  save_checkpoint(dir, params);
  std::vector<NamedTensor> wrong_shape{{"a", Tensor::zeros({4}, true)}};
  EXPECT_THROW(load_checkpoint(dir, wrong_shape), Error);
  std::vector<NamedTensor> wrong_name{{"z", Tensor::zeros({2, 2}, true)}};
  EXPECT_THROW(load_checkpoint(dir, wrong_name), Error);
  std::vector<NamedTensor> extra{{"a", Tensor::zeros({2, 2}, true)}, {"b", Tensor::zeros({1}, true)}};
  EXPECT_THROW(load_checkpoint(dir, extra), Error);
}

}  // namespace
}  // namespace mkp
