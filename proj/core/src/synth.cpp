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
#include "mkp/synth.hpp"

#include <array>
#include <cmath>
#include <cstdio>

#include "mkp/rng.hpp"

MKP_NAMESPACE_BEGIN

namespace {

constexpr std::size_t kCoarseSynonyms = 3;
constexpr std::size_t kFineSynonyms = 2;
constexpr std::size_t kMinWords = 2;
constexpr std::size_t kMaxWords = 6;

std::vector<std::string> filler_words() {
  static constexpr std::array<const char*, 12> kOnsets = {"b", "d", "f", "g", "k", "l",
                                                          "m", "n", "p", "r", "s", "t"};
  static constexpr std::array<const char*, 5> kVowels = {"a", "e", "i", "o", "u"};
  std::vector<std::string> words;
  for (const char* o1 : kOnsets) {
    for (const char* v1 : kVowels) {
      for (const char* o2 : {"l", "m", "n", "r", "s"}) {
        words.push_back(std::string(o1) + v1 + o2 + "o");
      }
    }
  }
  return words;  // 300 words, all lowercase letters
}

std::string coarse_cue(CoarseLabel c, std::size_t synonym) {
  return "c" + std::to_string(static_cast<int>(c)) + static_cast<char>('x' + synonym);
}

std::string fine_cue(Task t, std::size_t sibling_index, std::size_t synonym) {
  return std::string(t == Task::kEre ? "e" : "d") + std::to_string(sibling_index) +
         static_cast<char>('x' + synonym);
}

std::string sentence(Rng& rng, const std::vector<std::string>& words, const std::string& cue) {
  const std::size_t n = kMinWords + rng.uniform_index(kMaxWords - kMinWords + 1);
  const std::size_t cue_at = rng.uniform_index(n + 1);
  std::string out;
  for (std::size_t i = 0; i <= n; ++i) {
    if (!out.empty()) out += ' ';
    out += i == cue_at ? cue : words[rng.uniform_index(words.size())];
  }
  return out;
}

std::vector<InstancePair> generate_split(const TaskSpec& spec, std::size_t n,
                                         const std::string& split, double noise, Rng& rng,
                                         const std::vector<std::string>& words) {
  // Index of each fine label among the labels sharing its parent.
  std::vector<std::size_t> sibling(spec.size());
  std::array<std::size_t, kNumCoarse> seen{};
  for (std::size_t i = 0; i < spec.size(); ++i) {
    sibling[i] = seen[static_cast<std::size_t>(spec.parents[i])]++;
  }
  const std::string task = std::string(task_name(spec.task));
  std::vector<InstancePair> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t label = rng.uniform_index(spec.size());
    const CoarseLabel parent = spec.parents[label];
    InstancePair p;
    char id[64];
    std::snprintf(id, sizeof id, "%s-%s-%06zu", task == "ERE" ? "ere" : "drr", split.c_str(), k);
    p.id = id;
    p.task = spec.task;
    p.arg1 = sentence(rng, words, coarse_cue(parent, rng.uniform_index(kCoarseSynonyms)));
    p.arg2 = sentence(rng, words,
                      fine_cue(spec.task, sibling[label], rng.uniform_index(kFineSynonyms)));
    std::size_t gold = label;
    const double flip = rng.uniform();
    if (noise > 0 && flip < noise && spec.size() > 1) {
      gold = (label + 1 + rng.uniform_index(spec.size() - 1)) % spec.size();
    }
    p.fine_label = spec.fine_labels[gold];
    p.coarse_label = std::string(coarse_name(spec.parents[gold]));
    if (spec.task == Task::kEre) {
      p.confidence = std::round((1.0 + 9.0 * rng.uniform()) * 1000.0) / 1000.0;
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

void SynthSpec::validate(const TaskSpecs& specs) const {
  if (!(noise >= 0.0 && noise < 0.5)) throw ConfigError("synthetic noise rate must be in [0, 0.5)");
  const std::size_t labels = std::max(specs.ere.size(), specs.drr.size());
  for (std::size_t n : {n_train, n_dev, n_test}) {
    if (n < 2 * labels) {
      throw ConfigError("synthetic split size " + std::to_string(n) +
                        " is below 2 instances per label (" + std::to_string(2 * labels) + ")");
    }
  }
}

SynthCorpus synth_generate(const SynthSpec& spec, const TaskSpecs& specs) {
  specs.ere.validate();
  specs.drr.validate();
  spec.validate(specs);
  const auto words = filler_words();
  Rng root(spec.seed);
  SynthCorpus c;
  c.specs = specs;
  for (Task t : {Task::kEre, Task::kDrr}) {
    Rng task_rng = root.split();
    Rng train_rng = task_rng.split(), dev_rng = task_rng.split(), test_rng = task_rng.split();
    const TaskSpec& ts = specs.get(t);
    Splits& s = t == Task::kEre ? c.ere : c.drr;
    s.train = generate_split(ts, spec.n_train, "train", spec.noise, train_rng, words);
    s.dev = generate_split(ts, spec.n_dev, "dev", 0.0, dev_rng, words);
    s.test = generate_split(ts, spec.n_test, "test", 0.0, test_rng, words);
  }
  return c;
}

std::filesystem::path write_corpus(const std::filesystem::path& dir, const SynthCorpus& corpus,
                                   const SynthSpec& spec) {
  std::filesystem::create_directories(dir);
  DatasetManifest m;
  m.specs = corpus.specs;
  auto put = [&](const std::string& name, const std::vector<InstancePair>& pairs) {
    const std::string file = name + ".jsonl";
    save_jsonl(dir / file, pairs);
    m.splits[name] = {file, pairs.size()};
  };
  put("ere_train", corpus.ere.train);
  put("ere_dev", corpus.ere.dev);
  put("ere_test", corpus.ere.test);
  put("drr_train", corpus.drr.train);
  put("drr_dev", corpus.drr.dev);
  put("drr_test", corpus.drr.test);
  m.provenance = {{"source", "synthetic"},
                  {"seed", spec.seed},
                  {"noise", spec.noise},
                  {"n_train", spec.n_train},
                  {"n_dev", spec.n_dev},
                  {"n_test", spec.n_test}};
  const auto path = dir / "manifest.json";
  save_manifest(path, m);
  return path;
}

MKP_NAMESPACE_END
