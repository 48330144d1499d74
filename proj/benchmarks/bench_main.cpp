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
#include <benchmark/benchmark.h>

#include "mkp/encoder.hpp"
#include "mkp/model.hpp"
#include "mkp/ops.hpp"
#include "mkp/synth.hpp"
#include "mkp/trainer.hpp"

namespace {

using namespace mkp;

Tensor random(Shape shape, Rng& rng, bool grad = false) {
  std::vector<Real> v(shape_numel(shape));
  for (Real& x : v) x = static_cast<Real>(rng.normal());
  return Tensor::from(std::move(shape), std::move(v), grad);
}

void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  const Tensor a = random({n, n}, rng), b = random({n, n}, rng);
  NoGradGuard no_grad;
  for (auto _ : state) benchmark::DoNotOptimize(ops::matmul(a, b));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(2 * n * n * n));
}
BENCHMARK(BM_Matmul)->Arg(64)->Arg(128)->Arg(256);

struct Fixture {
  SynthCorpus corpus = synth_generate(SynthSpec{});
  Vocab vocab = [this] {
    std::vector<std::string> texts;
    for (const auto& p : corpus.ere.train) {
      texts.push_back(p.arg1);
      texts.push_back(p.arg2);
    }
    return Vocab::build(texts, 8192);
  }();
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_EncoderForward(benchmark::State& state) {
  const auto& f = fixture();
  Rng rng(2);
  EncoderConfig cfg;
  cfg.vocab_size = f.vocab.size();
  const Encoder enc(cfg, rng);
  std::vector<TokenizedPair> batch;
  for (std::size_t i = 0; i < 32; ++i) {
    const auto& p = f.corpus.ere.train[i];
    batch.push_back(tokenize_pair(p.arg1, p.arg2, f.vocab, cfg.max_len));
  }
  const bool backward = state.range(0) != 0;
  for (auto _ : state) {
    if (backward) {
      const Tensor h = enc.encode(batch);
      ops::sum(h).backward();
    } else {
      NoGradGuard no_grad;
      benchmark::DoNotOptimize(enc.encode(batch));
    }
  }
  state.SetItemsProcessed(state.iterations() * 32);
}
BENCHMARK(BM_EncoderForward)->Arg(0)->Arg(1)->ArgNames({"backward"});

void BM_TrainStep(benchmark::State& state) {
  const auto& f = fixture();
  MkpNet net(ModelConfig{}, AblationConfig{}, f.corpus.specs, f.vocab, 3);
  Trainer trainer(net, TrainerConfig{});
  const auto batch = net.prepare(
      std::vector<InstancePair>(f.corpus.ere.train.begin(), f.corpus.ere.train.begin() + 32));
  for (auto _ : state) benchmark::DoNotOptimize(trainer.train_step(batch));
  state.SetItemsProcessed(state.iterations() * 32);
}
BENCHMARK(BM_TrainStep)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
