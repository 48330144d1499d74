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

#include <span>
#include <vector>

#include "mkp/metrics.hpp"
#include "mkp/rng.hpp"

namespace mkp {
namespace {

// Independent macro-F1 from precision and recall, as usually written.
double oracle_macro_f1(const std::vector<int>& gold, const std::vector<int>& pred, int n) {
  double sum = 0;
  for (int c = 0; c < n; ++c) {
    double tp = 0, p = 0, g = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
      tp += gold[i] == c && pred[i] == c;
      p += pred[i] == c;
      g += gold[i] == c;
    }
    const double prec = p > 0 ? tp / p : 0, rec = g > 0 ? tp / g : 0;
    sum += prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0;
  }
  return sum / n;
}

TEST(Accuracy, Examples) {
  const std::vector<int> g{0, 0, 1, 1}, p{0, 1, 1, 1};
  EXPECT_DOUBLE_EQ(accuracy(g, p), 0.75);
  EXPECT_DOUBLE_EQ(accuracy(g, g), 1.0);
  EXPECT_THROW(accuracy(g, std::vector<int>{0}), DataError);
  EXPECT_THROW(accuracy(std::vector<int>{}, std::vector<int>{}), DataError);
}

TEST(MacroF1, WorkedExample) {
  // A: P=1, R=0.5, F=2/3. B: P=2/3, R=1, F=0.8. Mean 0.7333.
  const std::vector<int> g{0, 0, 1, 1}, p{0, 1, 1, 1};
  EXPECT_NEAR(macro_f1(g, p, label_range(2)), 0.733333, 1e-6);
  EXPECT_NEAR(micro_f1(g, p, label_range(2)), 0.75, 1e-12);
}

TEST(MacroF1, UnseenLabelScoresZero) {
  const std::vector<int> g{0, 1}, p{0, 1};
  EXPECT_DOUBLE_EQ(macro_f1(g, p, label_range(2)), 1.0);
  EXPECT_DOUBLE_EQ(macro_f1(g, p, label_range(4)), 0.5);
  EXPECT_THROW(macro_f1(std::vector<int>{5}, std::vector<int>{5}, label_range(2)), DataError);
}

TEST(MacroF1, MatchesOracleAndIsPermutationInvariant) {
  Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_index(10));
    const std::size_t len = 1 + rng.uniform_index(60);
    std::vector<int> g(len), p(len);
    for (std::size_t i = 0; i < len; ++i) {
      g[i] = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(n)));
      p[i] = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(n)));
    }
    const auto labels = label_range(static_cast<std::size_t>(n));
    const double f = macro_f1(g, p, labels);
    EXPECT_NEAR(f, oracle_macro_f1(g, p, n), 1e-12);
    EXPECT_GE(f, 0.0);
    EXPECT_LE(f, 1.0);
    std::vector<std::size_t> order(len);
    for (std::size_t i = 0; i < len; ++i) order[i] = i;
    rng.shuffle(std::span<std::size_t>(order));
    std::vector<int> g2, p2;
    for (auto i : order) {
      g2.push_back(g[i]);
      p2.push_back(p[i]);
    }
    EXPECT_NEAR(macro_f1(g2, p2, labels), f, 1e-12);
  }
}

TEST(Significance, IdenticalSystemsGiveOne) {
  const std::vector<int> g{0, 1, 2, 0, 1}, p{0, 2, 2, 1, 1};
  EXPECT_DOUBLE_EQ(significance(g, p, p, 1000, 1), 1.0);
}

TEST(Significance, PerfectVersusRandomIsSignificant) {
  Rng rng(4);
  std::vector<int> g(300), r(300);
  for (std::size_t i = 0; i < g.size(); ++i) {
    g[i] = static_cast<int>(rng.uniform_index(5));
    r[i] = static_cast<int>(rng.uniform_index(5));
  }
  const double p = significance(g, g, r, 2000, 9);
  EXPECT_LT(p, 0.01);
  EXPECT_GE(p, 1.0 / 2001);
  EXPECT_DOUBLE_EQ(significance(g, g, r, 2000, 9), p);
  EXPECT_DOUBLE_EQ(significance(g, r, g, 2000, 9), p);
}

}  // namespace
}  // namespace mkp
