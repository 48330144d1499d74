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

#ifndef MKP_RNG_HPP_
#define MKP_RNG_HPP_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>

#include "mkp/common.hpp"

MKP_NAMESPACE_BEGIN

// Explicit-state generator. Distribution transforms are implemented here
// rather than through <random> distributions so streams are identical
// across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of resolution.
  double uniform();
  // Uniform integer in [0, n).
  std::size_t uniform_index(std::size_t n);
  // Standard normal via Box-Muller.
  double normal();

  // Independent child stream; advances this stream by one draw.
  Rng split();

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[uniform_index(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

MKP_NAMESPACE_END

#endif  // MKP_RNG_HPP_
