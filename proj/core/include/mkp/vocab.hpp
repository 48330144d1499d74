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
#ifndef MKP_VOCAB_HPP_
#define MKP_VOCAB_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mkp/common.hpp"

MKP_NAMESPACE_BEGIN

// Lowercases ASCII, splits on whitespace, and emits each ASCII punctuation
// character as its own token.
std::vector<std::string> normalize_tokens(std::string_view text);

class Vocab {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kCls = 2;
  static constexpr int kSep = 3;
  static constexpr int kReserved = 4;

  // Only the reserved tokens.
  Vocab();

  // Reserved tokens followed by the most frequent tokens of `texts` (ties
  // broken lexicographically), `cap` entries in total.
  static Vocab build(std::span<const std::string> texts, std::size_t cap);

  static Vocab load(const std::filesystem::path& path);
  // One token per line, line number = id.
  void save(const std::filesystem::path& path) const;

  // [UNK] for tokens outside the vocabulary.
  int id(std::string_view token) const;
  const std::string& token(int id) const;
  std::size_t size() const { return tokens_.size(); }
  bool contains(std::string_view token) const;

  // FNV-1a over the token list, as 16 hex digits.
  std::string hash() const;

 private:
  void add(std::string token);

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

// [CLS] a1 [SEP] a2 [SEP] with segment 0 through the first [SEP].
struct TokenizedPair {
  std::vector<int> token_ids;
  std::vector<int> segment_ids;
  std::vector<int> position_ids;
  std::vector<std::uint8_t> attention_mask;

  std::size_t size() const { return token_ids.size(); }
  // Appends [PAD] positions (mask 0) up to `length`.
  void pad_to(std::size_t length);
};

// Truncates the arguments proportionally to their lengths when the pair
// does not fit `max_len`; the rounding remainder goes to the first argument.
// Throws DataError on an empty argument, ConfigError when max_len < 5.
TokenizedPair tokenize_pair(std::string_view arg1, std::string_view arg2,
                            const Vocab& vocab, std::size_t max_len);

MKP_NAMESPACE_END

#endif  // MKP_VOCAB_HPP_
