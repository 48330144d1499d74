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
#include <set>

#include "mkp/encoder.hpp"
#include "mkp/ops.hpp"
#include "test_util.hpp"

namespace mkp {
namespace {

class EncoderTest : public ::testing::Test {
 protected:
  EncoderTest()
      : vocab_(Vocab::build(std::vector<std::string>{"alpha beta gamma delta", "one two three"}, 100)),
        rng_(7),
        enc_(EncoderConfig{2, 4, 16, 20, vocab_.size()}, rng_) {}

  TokenizedPair pair(const std::string& a, const std::string& b) const {
    return tokenize_pair(a, b, vocab_, 20);
  }

  Vocab vocab_;
  Rng rng_;
  Encoder enc_;
};

TEST_F(EncoderTest, OutputShape) {
  const std::vector<TokenizedPair> batch{pair("alpha", "one"), pair("beta gamma", "two three"),
                                         pair("delta", "one two")};
  EXPECT_EQ(enc_.encode(batch).shape(), (Shape{3, 16}));
}

TEST_F(EncoderTest, DuplicateRowsIdentical) {
  const std::vector<TokenizedPair> batch{pair("alpha beta", "one"), pair("alpha beta", "one")};
  const Tensor h = enc_.encode(batch);
  for (std::size_t i = 0; i < 16; ++i) EXPECT_EQ(h.at(i), h.at(16 + i));
}

TEST_F(EncoderTest, BatchPermutationPermutesRows) {
  const auto a = pair("alpha beta", "one"), b = pair("gamma", "two three delta");
  const Tensor ab = enc_.encode(std::vector<TokenizedPair>{a, b});
  const Tensor ba = enc_.encode(std::vector<TokenizedPair>{b, a});
  for (std::size_t i = 0; i < 16; ++i) {
    EXPECT_NEAR(ab.at(i), ba.at(16 + i), 1e-6);
    EXPECT_NEAR(ab.at(16 + i), ba.at(i), 1e-6);
  }
}

TEST_F(EncoderTest, PaddingDoesNotChangeCls) {
  const auto p = pair("alpha beta", "one");
  auto padded = p;
  padded.pad_to(18);
  const Tensor h1 = enc_.encode(std::vector<TokenizedPair>{p});
  const Tensor h2 = enc_.encode(std::vector<TokenizedPair>{padded});
  // Also in a batch next to a longer sequence.
  const Tensor h3 = enc_.encode(std::vector<TokenizedPair>{p, pair("alpha beta gamma delta", "one two three")});
  for (std::size_t i = 0; i < 16; ++i) {
    EXPECT_NEAR(h1.at(i), h2.at(i), 1e-5);
    EXPECT_NEAR(h1.at(i), h3.at(i), 1e-5);
  }
}

TEST_F(EncoderTest, TooLongSequenceRejected) {
  const auto long_pair = tokenize_pair("alpha beta gamma delta alpha beta gamma delta alpha beta",
                                       "one two three one two three one two three one", vocab_, 30);
  EXPECT_THROW(enc_.encode(std::vector<TokenizedPair>{long_pair}), ShapeError);
}

TEST_F(EncoderTest, DeterministicGivenSeed) {
  Rng r1(7), r2(7);
  Encoder e1(enc_.config(), r1), e2(enc_.config(), r2);
  const std::vector<TokenizedPair> batch{pair("alpha", "two")};
  const Tensor h1 = e1.encode(batch), h2 = e2.encode(batch);
  for (std::size_t i = 0; i < 16; ++i) EXPECT_EQ(h1.at(i), h2.at(i));
}

TEST_F(EncoderTest, ParametersUniqueAndFinite) {
  const auto params = enc_.parameters();
  std::set<std::string> names;
  for (const auto& p : params) {
    EXPECT_TRUE(names.insert(p.name).second) << p.name;
    for (Real v : p.tensor.values()) ASSERT_TRUE(std::isfinite(v));
  }
  EXPECT_EQ(params.front().tensor.shape(), (Shape{vocab_.size(), 16}));
}

TEST_F(EncoderTest, EveryParameterReceivesGradient) {
  const std::vector<TokenizedPair> batch{pair("alpha beta", "one"), pair("gamma", "two three")};
  backward(ops::sum(ops::mul(enc_.encode(batch), enc_.encode(batch))));
  for (const auto& p : enc_.parameters()) {
    ASSERT_TRUE(p.tensor.has_grad()) << p.name;
    double norm = 0;
    for (Real g : p.tensor.grad()) norm += std::abs(g);
    EXPECT_GT(norm, 0) << p.name;
  }
}

TEST(EncoderConfig, Validation) {
  EXPECT_THROW((EncoderConfig{2, 3, 16, 20, 10}).validate(), ConfigError);
  EXPECT_THROW((EncoderConfig{0, 2, 16, 20, 10}).validate(), ConfigError);
  EXPECT_NO_THROW((EncoderConfig{1, 2, 16, 20, 10}).validate());
}

}  // namespace
}  // namespace mkp
