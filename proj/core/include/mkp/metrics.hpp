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
#ifndef MKP_METRICS_HPP_
#define MKP_METRICS_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "mkp/common.hpp"

MKP_NAMESPACE_BEGIN

// Fraction of positions where pred equals gold. Throws DataError on a
// length mismatch or empty input.
double accuracy(std::span<const int> gold, std::span<const int> pred);

// Unweighted mean of per-label F1 over `labels`. A label with
// precision + recall = 0 scores 0. Every gold value must appear in `labels`.
double macro_f1(std::span<const int> gold, std::span<const int> pred,
                std::span<const int> labels);

// Pooled TP / FP / FN over `labels`.
double micro_f1(std::span<const int> gold, std::span<const int> pred,
                std::span<const int> labels);

// 0..n-1, the usual label set for a classifier with n outputs.
std::vector<int> label_range(std::size_t n);

// Two-sided approximate randomization test on the accuracy difference.
// Each iteration swaps the two systems' outputs per item with probability
// 1/2; p = (count(|diff| >= observed) + 1) / (iterations + 1).
double significance(std::span<const int> gold, std::span<const int> pred_a,
                    std::span<const int> pred_b, std::size_t iterations, std::uint64_t seed);

MKP_NAMESPACE_END

#endif  // MKP_METRICS_HPP_
