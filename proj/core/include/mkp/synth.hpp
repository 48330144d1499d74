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
#ifndef MKP_SYNTH_HPP_
#define MKP_SYNTH_HPP_

#include <cstdint>
#include <filesystem>

#include "mkp/data.hpp"

MKP_NAMESPACE_BEGIN

struct SynthSpec {
  std::size_t n_train = 2000;
  std::size_t n_dev = 400;
  std::size_t n_test = 400;
  std::uint64_t seed = 7;
  // Fraction of training labels replaced by a different fine label.
  // Dev and test labels stay clean.
  double noise = 0.1;

  void validate(const TaskSpecs& specs) const;
};

struct SynthCorpus {
  TaskSpecs specs;
  Splits ere;
  Splits drr;
};

// Planted-structure corpus. Every pair carries one coarse cue token in its
// first argument (shared cue inventory across tasks) and one fine cue token
// in its second argument. The fine cue encodes the label's index among the
// siblings under its coarse parent, with a separate cue inventory per task,
// so the fine label is recoverable only from both cues together. Labels are
// drawn uniformly. ERE instances carry a confidence score.
SynthCorpus synth_generate(const SynthSpec& spec, const TaskSpecs& specs = default_task_specs());

// Writes {ere,drr}_{train,dev,test}.jsonl and manifest.json into `dir`.
// Returns the manifest path.
std::filesystem::path write_corpus(const std::filesystem::path& dir, const SynthCorpus& corpus,
                                   const SynthSpec& spec);

MKP_NAMESPACE_END

#endif  // MKP_SYNTH_HPP_
