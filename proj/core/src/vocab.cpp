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
#include "mkp/vocab.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>

MKP_NAMESPACE_BEGIN

namespace {
constexpr const char* kReservedTokens[] = {"[PAD]", "[UNK]", "[CLS]", "[SEP]"};
}  // namespace

std::vector<std::string> normalize_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(std::move(cur));
    cur.clear();
  };
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      flush();
    } else if (c < 128 && std::ispunct(c)) {
      flush();
      out.emplace_back(1, ch);
    } else {
      cur.push_back(c < 128 ? static_cast<char>(std::tolower(c)) : ch);
    }
  }
  flush();
  return out;
}

Vocab::Vocab() {
  for (const char* t : kReservedTokens) add(t);
}

void Vocab::add(std::string token) {
  if (index_.contains(token)) throw DataError("duplicate vocabulary token '" + token + "'");
  index_.emplace(token, static_cast<int>(tokens_.size()));
  tokens_.push_back(std::move(token));
}

Vocab Vocab::build(std::span<const std::string> texts, std::size_t cap) {
  if (cap < kReserved) throw ConfigError("vocabulary cap must be at least 4");
  std::map<std::string, std::size_t> counts;
  for (const auto& text : texts) {
    for (auto& tok : normalize_tokens(text)) ++counts[tok];
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  Vocab vocab;
  for (auto& [tok, n] : ranked) {
    if (vocab.size() >= cap) break;
    if (vocab.contains(tok)) continue;
    vocab.add(tok);
  }
  return vocab;
}

Vocab Vocab::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read vocabulary " + path.string());
  Vocab vocab;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    if (lineno < kReserved) {
      if (line != kReservedTokens[lineno]) {
        throw DataError("vocabulary line " + std::to_string(lineno + 1) + " must be " +
                        kReservedTokens[lineno]);
      }
    } else {
      vocab.add(line);
    }
    ++lineno;
  }
  if (lineno < kReserved) throw DataError("vocabulary lacks reserved tokens");
  return vocab;
}

void Vocab::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write vocabulary " + path.string());
  for (const auto& t : tokens_) out << t << '\n';
}

int Vocab::id(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? kUnk : it->second;
}

const std::string& Vocab::token(int id) const { return tokens_.at(static_cast<std::size_t>(id)); }

bool Vocab::contains(std::string_view token) const {
  return index_.contains(std::string(token));
}

std::string Vocab::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& t : tokens_) {
    for (unsigned char c : t) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= '\n';
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void TokenizedPair::pad_to(std::size_t length) {
  while (token_ids.size() < length) {
    position_ids.push_back(static_cast<int>(token_ids.size()));
    token_ids.push_back(Vocab::kPad);
    segment_ids.push_back(1);
    attention_mask.push_back(0);
  }
}

TokenizedPair tokenize_pair(std::string_view arg1, std::string_view arg2,
                            const Vocab& vocab, std::size_t max_len) {
  if (max_len < 5) throw ConfigError("max_len must be at least 5 to hold [CLS] a [SEP] b [SEP]");
  auto t1 = normalize_tokens(arg1);
  auto t2 = normalize_tokens(arg2);
  if (t1.empty() || t2.empty()) throw DataError("argument is empty after normalization");

  const std::size_t budget = max_len - 3;
  std::size_t n1 = t1.size(), n2 = t2.size();
  if (n1 + n2 > budget) {
    const std::size_t total = n1 + n2;
    std::size_t k1 = (budget * n1 + total - 1) / total;
    k1 = std::clamp<std::size_t>(k1, 1, budget - 1);
    std::size_t k2 = budget - k1;
    // Hand back budget an argument cannot use.
    if (k2 > n2) { k1 += k2 - n2; k2 = n2; }
    if (k1 > n1) { k2 += k1 - n1; k1 = n1; }
    n1 = k1;
    n2 = k2;
  }

  TokenizedPair out;
  auto push = [&](int id, int segment) {
    out.position_ids.push_back(static_cast<int>(out.token_ids.size()));
    out.token_ids.push_back(id);
    out.segment_ids.push_back(segment);
    out.attention_mask.push_back(1);
  };
  push(Vocab::kCls, 0);
  for (std::size_t i = 0; i < n1; ++i) push(vocab.id(t1[i]), 0);
  push(Vocab::kSep, 0);
  for (std::size_t i = 0; i < n2; ++i) push(vocab.id(t2[i]), 1);
  push(Vocab::kSep, 1);
  return out;
}

MKP_NAMESPACE_END
