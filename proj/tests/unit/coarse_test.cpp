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

#include "mkp/coarse.hpp"
#include "mkp/ops.hpp"

namespace mkp {
namespace {

Tensor random(Shape s, std::uint64_t seed) {
  Rng r(seed);
  std::vector<Real> v(shape_numel(s));
  for (Real& x : v) x = static_cast<Real>(r.normal());
  return Tensor::from(std::move(s), std::move(v));
}

TEST(CoarseLabel, FixedIdsAndNames) {
  EXPECT_EQ(kNumCoarse, 4u);
  EXPECT_EQ(static_cast<int>(CoarseLabel::kTemporal), 0);
  EXPECT_EQ(static_cast<int>(CoarseLabel::kExpansion), 3);
  EXPECT_EQ(coarse_name(CoarseLabel::kContingency), "Contingency");
  EXPECT_EQ(parse_coarse("Comparison"), CoarseLabel::kComparison);
  EXPECT_FALSE(parse_coarse("comparison").has_value());
}

TEST(CoarseHeads, ZeroWeightsGiveUniform) {
  Rng rng(1);
  CoarseHeads heads(10, 4, rng);
  for (Real& v : heads.weight().mutable_values()) v = 0;
  const Tensor p = heads.classify(random({2, 6}, 2), random({2, 4}, 3));
  for (Real v : p.values()) EXPECT_FLOAT_EQ(v, 0.25f);
}

TEST(CoarseHeads, ProbabilitiesSumToOne) {
  Rng rng(1);
  CoarseHeads heads(10, 4, rng);
  const Tensor p = heads.classify(random({5, 6}, 2), random({5, 4}, 3));
  for (std::size_t r = 0; r < 5; ++r) {
    double s = 0;
    for (std::size_t c = 0; c < 4; ++c) s += p.at(r * 4 + c);
    EXPECT_NEAR(s, 1, 1e-5);
  }
}

TEST(CoarseHeads, ArgmaxInvariantToLogitShift) {
  Rng rng(1);
  CoarseHeads heads(10, 4, rng);
  const Tensor logits = heads.logits(random({6, 6}, 2), random({6, 4}, 3));
  const Tensor shifted = ops::add(logits, Tensor::full({4}, 7.5));
  EXPECT_EQ(argmax_rows(logits), argmax_rows(shifted));
}

TEST(CoarseHeads, WorksWithoutLatent) {
  Rng rng(1);
  CoarseHeads heads(6, 4, rng);
  EXPECT_EQ(heads.logits(random({2, 6}, 2), Tensor()).shape(), (Shape{2, 4}));
  EXPECT_THROW(heads.logits(random({2, 6}, 2), random({2, 4}, 3)), ShapeError);
}

TEST(CoarseHeads, EmbedLooksUpRows) {
  Rng rng(1);
  CoarseHeads heads(6, 3, rng);
  const Tensor t = heads.embed(CoarseLabel::kTemporal);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(t.at(i), heads.table().at(i));
  const Tensor again = heads.embed(CoarseLabel::kTemporal);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(t.at(i), again.at(i));
  const int bad[] = {4};
  EXPECT_THROW(heads.embed(bad), Error);
}

TEST(CoarseHeads, GradientReachesOnlyUsedRow) {
  Rng rng(1);
  CoarseHeads heads(6, 3, rng);
  const int labels[] = {2, 2};
  backward(ops::sum(ops::mul(heads.embed(labels), Tensor::full({3}, 1.5))));
  const auto g = heads.table().grad();
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t c = 0; c < 3; ++c) {
      if (r == 2) {
        EXPECT_FLOAT_EQ(g[r * 3 + c], 3.0f);
      } else {
        EXPECT_EQ(g[r * 3 + c], 0);
      }
    }
  }
}

}  // namespace
}  // namespace mkp
