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
#include "mkp/metrics.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <numeric>
#include <string>

#include "mkp/rng.hpp"

MKP_NAMESPACE_BEGIN

namespace {

void check_lengths(std::span<const int> gold, std::span<const int> pred) {
  if (gold.size() != pred.size()) {
    throw DataError("metric inputs differ in length: " + std::to_string(gold.size()) + " vs " +
                    std::to_string(pred.size()));
  }
  if (gold.empty()) throw DataError("metric inputs are empty");
}

struct Counts {
  std::size_t tp = 0, fp = 0, fn = 0;
};

std::map<int, Counts> confusion(std::span<const int> gold, std::span<const int> pred,
                                std::span<const int> labels) {
  std::map<int, Counts> c;
  for (int l : labels) c[l];
  for (std::size_t i = 0; i < gold.size(); ++i) {
    auto g = c.find(gold[i]);
    if (g == c.end()) {
      throw DataError("gold label " + std::to_string(gold[i]) + " is not in the label set");
    }
    if (gold[i] == pred[i]) {
      ++g->second.tp;
      continue;
    }
    ++g->second.fn;
    if (auto p = c.find(pred[i]); p != c.end()) ++p->second.fp;
  }
  return c;
}

double f1(std::size_t tp, std::size_t fp, std::size_t fn) {
  const std::size_t denom = 2 * tp + fp + fn;
  return denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
}

}  // namespace

double accuracy(std::span<const int> gold, std::span<const int> pred) {
  check_lengths(gold, pred);
  std::size_t hit = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) hit += gold[i] == pred[i];
  return static_cast<double>(hit) / static_cast<double>(gold.size());
}

double macro_f1(std::span<const int> gold, std::span<const int> pred,
                std::span<const int> labels) {
  check_lengths(gold, pred);
  if (labels.empty()) throw DataError("macro_f1: empty label set");
  const auto c = confusion(gold, pred, labels);
  double total = 0;
  for (const auto& [label, k] : c) total += f1(k.tp, k.fp, k.fn);
  return total / static_cast<double>(c.size());
}

double micro_f1(std::span<const int> gold, std::span<const int> pred,
                std::span<const int> labels) {
  check_lengths(gold, pred);
  Counts sum;
  for (const auto& [label, k] : confusion(gold, pred, labels)) {
    sum.tp += k.tp;
    sum.fp += k.fp;
    sum.fn += k.fn;
  }
  return f1(sum.tp, sum.fp, sum.fn);
}

std::vector<int> label_range(std::size_t n) {
  std::vector<int> out(n);
  std::iota(out.begin(), out.end(), 0);
  return out;
}

double significance(std::span<const int> gold, std::span<const int> pred_a,
                    std::span<const int> pred_b, std::size_t iterations, std::uint64_t seed) {
  check_lengths(gold, pred_a);
  check_lengths(gold, pred_b);
  if (iterations < 1000) throw ConfigError("significance needs at least 1000 iterations");

  // Only items where exactly one system is correct move the difference.
  std::vector<int> delta;
  long observed = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const int d = static_cast<int>(pred_a[i] == gold[i]) - static_cast<int>(pred_b[i] == gold[i]);
    observed += d;
    if (d != 0) delta.push_back(d);
  }
  const long target = std::labs(observed);

  Rng rng(seed);
  std::size_t count = 0;
  for (std::size_t it = 0; it < iterations; ++it) {
    long diff = 0;
    std::uint64_t bits = 0;
    for (std::size_t j = 0; j < delta.size(); ++j) {
      if (j % 64 == 0) bits = rng.next_u64();
      diff += (bits & 1) ? -delta[j] : delta[j];
      bits >>= 1;
    }
    count += std::labs(diff) >= target;
  }
  return static_cast<double>(count + 1) / static_cast<double>(iterations + 1);
}

MKP_NAMESPACE_END
