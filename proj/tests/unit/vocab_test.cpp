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

#include <algorithm>

#include "mkp/vocab.hpp"
#include "test_util.hpp"

namespace mkp {
namespace {

Vocab restaurant_vocab() {
  const std::vector<std::string> texts{"PER goes to the restaurant", "PER is so hungry"};
  return Vocab::build(texts, 100);
}

std::string render(const TokenizedPair& t, const Vocab& v) {
  std::string s;
  for (int id : t.token_ids) s += (s.empty() ? "" : " ") + v.token(id);
  return s;
}

TEST(Normalize, LowercasesAndSplitsPunctuation) {
  EXPECT_EQ(normalize_tokens("He said, \"Go!\"  NOW"),
            (std::vector<std::string>{"he", "said", ",", "\"", "go", "!", "\"", "now"}));
  EXPECT_TRUE(normalize_tokens("   \t ").empty());
}

TEST(Vocab, ReservedIdsAndFrequencyOrder) {
  const std::vector<std::string> texts{"b a a", "c b a"};
  const Vocab v = Vocab::build(texts, 100);
  EXPECT_EQ(v.token(Vocab::kPad), "[PAD]");
  EXPECT_EQ(v.token(Vocab::kUnk), "[UNK]");
  EXPECT_EQ(v.token(Vocab::kCls), "[CLS]");
  EXPECT_EQ(v.token(Vocab::kSep), "[SEP]");
  EXPECT_EQ(v.id("a"), 4);  // frequency 3
  EXPECT_EQ(v.id("b"), 5);  // frequency 2
  EXPECT_EQ(v.id("c"), 6);
  EXPECT_EQ(v.id("zzz"), Vocab::kUnk);
}

TEST(Vocab, CapKeepsMostFrequentWithLexicographicTies) {
  const std::vector<std::string> texts{"d c b a a"};
  const Vocab v = Vocab::build(texts, 6);
  EXPECT_EQ(v.size(), 6u);
  EXPECT_TRUE(v.contains("a"));
  EXPECT_TRUE(v.contains("b"));
  EXPECT_FALSE(v.contains("c"));
}

TEST(Vocab, BijectionAndFileRoundTrip) {
  const Vocab v = restaurant_vocab();
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(v.id(v.token(static_cast<int>(i))), static_cast<int>(i));
  const auto dir = testing::scratch_dir("vocab_roundtrip");
  v.save(dir / "vocab.txt");
  const Vocab back = Vocab::load(dir / "vocab.txt");
  EXPECT_EQ(back.size(), v.size());
  EXPECT_EQ(back.hash(), v.hash());
  EXPECT_EQ(testing::read_file(dir / "vocab.txt").substr(0, 24), "[PAD]\n[UNK]\n[CLS]\n[SEP]\n");
}

TEST(Vocab, LoadRejectsBadReservedLines) {
  const auto dir = testing::scratch_dir("vocab_bad");
  testing::write_text(dir / "vocab.txt", "[UNK]\n[PAD]\n[CLS]\n[SEP]\nx\n");
  EXPECT_THROW(Vocab::load(dir / "vocab.txt"), DataError);
}

TEST(TokenizePair, RestaurantLayout) {
  const Vocab v = restaurant_vocab();
  const auto t = tokenize_pair("PER goes to the restaurant", "PER is so hungry", v, 64);
  EXPECT_EQ(render(t, v), "[CLS] per goes to the restaurant [SEP] per is so hungry [SEP]");
  // [CLS], the five arg1 tokens and the first [SEP] are segment 0.
  EXPECT_EQ(t.segment_ids, (std::vector<int>{0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1}));
  for (std::size_t i = 0; i < t.size(); ++i) EXPECT_EQ(t.position_ids[i], static_cast<int>(i));
  EXPECT_TRUE(std::all_of(t.attention_mask.begin(), t.attention_mask.end(), [](auto m) { return m == 1; }));
}

TEST(TokenizePair, MinimalFit) {
  const Vocab v = restaurant_vocab();
  const auto t = tokenize_pair("a", "a", v, 5);
  EXPECT_EQ(t.size(), 5u);
  EXPECT_EQ(t.token_ids, (std::vector<int>{Vocab::kCls, Vocab::kUnk, Vocab::kSep, Vocab::kUnk, Vocab::kSep}));
}

TEST(TokenizePair, UnknownTokenMapsToUnk) {
  const Vocab v = restaurant_vocab();
  const auto t = tokenize_pair("per flies", "hungry", v, 16);
  EXPECT_EQ(t.token_ids[2], Vocab::kUnk);
  EXPECT_EQ(t.token_ids[1], v.id("per"));
}

TEST(TokenizePair, ProportionalTruncation) {
  const Vocab v = restaurant_vocab();
  // 6 + 3 tokens into a budget of 6: arg1 keeps ceil(6 * 6 / 9) = 4.
  const auto t = tokenize_pair("a b c d e f", "x y z", v, 9);
  EXPECT_EQ(t.size(), 9u);
  EXPECT_EQ(t.token_ids[5], Vocab::kSep);
  EXPECT_EQ(t.token_ids[8], Vocab::kSep);
  // Ties go to arg1.
  const auto tie = tokenize_pair("a b c", "x y z", v, 6);
  EXPECT_EQ(tie.token_ids[3], Vocab::kSep);
}

TEST(TokenizePair, InvariantsOnRandomInputs) {
  const Vocab v = restaurant_vocab();
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    std::string a, b;
    const auto na = 1 + rng.uniform_index(30), nb = 1 + rng.uniform_index(30);
    for (std::size_t i = 0; i < na; ++i) a += "w" + std::to_string(rng.uniform_index(9)) + " ";
    for (std::size_t i = 0; i < nb; ++i) b += "v ";
    const std::size_t max_len = 5 + rng.uniform_index(40);
    const auto t = tokenize_pair(a, b, v, max_len);
    ASSERT_LE(t.size(), max_len);
    ASSERT_EQ(t.token_ids.front(), Vocab::kCls);
    ASSERT_EQ(std::count(t.token_ids.begin(), t.token_ids.end(), Vocab::kSep), 2);
    ASSERT_TRUE(std::is_sorted(t.segment_ids.begin(), t.segment_ids.end()));
    ASSERT_EQ(t.token_ids.size(), t.segment_ids.size());
  }
}

TEST(TokenizePair, Errors) {
  const Vocab v = restaurant_vocab();
  EXPECT_THROW(tokenize_pair("  ", "b", v, 10), DataError);
  EXPECT_THROW(tokenize_pair("a", "", v, 10), DataError);
  EXPECT_THROW(tokenize_pair("a", "b", v, 4), ConfigError);
}

TEST(TokenizePair, PadToMasksPadding) {
  const Vocab v = restaurant_vocab();
  auto t = tokenize_pair("a", "b", v, 10);
  t.pad_to(8);
  EXPECT_EQ(t.size(), 8u);
  EXPECT_EQ(t.token_ids[7], Vocab::kPad);
  EXPECT_EQ(t.attention_mask[7], 0);
  EXPECT_EQ(t.attention_mask[4], 1);
}

}  // namespace
}  // namespace mkp
