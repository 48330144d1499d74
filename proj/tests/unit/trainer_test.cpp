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

#include <sstream>

#include "mkp/trainer.hpp"
#include "test_util.hpp"

namespace mkp {
namespace {

std::vector<Real> flatten(const std::vector<NamedTensor>& params) {
  std::vector<Real> out;
  for (const auto& p : params) out.insert(out.end(), p.tensor.values().begin(), p.tensor.values().end());
  return out;
}

class TrainerTest : public ::testing::Test {
 protected:
  TrainerTest() : corpus_(synth_generate(testing::tiny_synth())), vocab_(testing::vocab_for(corpus_)) {}

  MkpNet make(AblationConfig abl = {}) const {
    return MkpNet(testing::tiny_model(), abl, corpus_.specs, vocab_, 5);
  }
  std::vector<Example> slice(const MkpNet& net, const std::vector<InstancePair>& src, std::size_t n) const {
    return net.prepare(std::vector<InstancePair>(src.begin(), src.begin() + static_cast<std::ptrdiff_t>(n)));
  }
  TrainerConfig small_cfg() const {
    TrainerConfig c;
    c.epochs = 2;
    c.batch_size = 16;
    return c;
  }

  SynthCorpus corpus_;
  Vocab vocab_;
};

TEST(CombinedLoss, Examples) {
  TrainerConfig c;
  c.alpha = 0.5;
  c.lambda = 1;
  EXPECT_NEAR(combined_loss(2, 0.4, 1, c), 1.7, 1e-12);
  c.alpha = 1;
  EXPECT_DOUBLE_EQ(combined_loss(2, 0.4, 100, c), 2.4);
  c.lambda = 0;
  EXPECT_DOUBLE_EQ(combined_loss(2, 50, 100, c), 2);
  c.alpha = 0;
  EXPECT_DOUBLE_EQ(combined_loss(2, 50, 1.25, c), 1.25);
}

TEST(CombinedLoss, TensorFormMatchesScalarForm) {
  TrainerConfig c;
  Rng rng(2);
  for (int i = 0; i < 200; ++i) {
    c.alpha = rng.uniform();
    c.lambda = rng.uniform() * 2;
    const double f = rng.uniform() * 3, k = rng.uniform() * 3, q = rng.uniform() * 3;
    const Tensor t = combined_loss(Tensor::scalar(static_cast<Real>(f)), Tensor::scalar(static_cast<Real>(k)),
                                   Tensor::scalar(static_cast<Real>(q)), c);
    ASSERT_NEAR(t.item(), combined_loss(static_cast<Real>(f), static_cast<Real>(k), static_cast<Real>(q), c), 1e-5);
  }
}

TEST(Schedule, RoundRobin) {
  using enum Task;
  EXPECT_EQ(round_robin_schedule(4, 4, 1, 1),
            (std::vector<Task>{kEre, kDrr, kEre, kDrr, kEre, kDrr, kEre, kDrr}));
  EXPECT_EQ(round_robin_schedule(4, 2, 2, 1), (std::vector<Task>{kEre, kEre, kDrr, kEre, kEre, kDrr}));
  EXPECT_EQ(round_robin_schedule(1, 3, 1, 1), (std::vector<Task>{kEre, kDrr, kDrr, kDrr}));
  EXPECT_EQ(round_robin_schedule(3, 0, 1, 1), (std::vector<Task>{kEre, kEre, kEre}));
  EXPECT_THROW(round_robin_schedule(1, 1, 0, 1), ConfigError);
}

TEST(TrainerConfig, ValidationAndJson) {
  TrainerConfig c;
  c.alpha = 1.5;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.ratio_drr = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.lambda = -1;
  EXPECT_THROW(c.validate(), ConfigError);
  TrainerConfig d;
  d.ratio_ere = 3;
  d.target_task = Task::kDrr;
  const TrainerConfig back = trainer_config_from_json(to_json(d));
  EXPECT_EQ(back.ratio_ere, 3u);
  EXPECT_EQ(back.target_task, Task::kDrr);
  EXPECT_THROW(trainer_config_from_json({{"alpah", 0.1}}), ConfigError);
  EXPECT_THROW(trainer_config_from_json({{"ratio", {1}}}), ConfigError);
}

TEST_F(TrainerTest, StepIsolation) {
  for (Task task : {Task::kDrr, Task::kEre}) {
    MkpNet net = make();
    Trainer trainer(net, small_cfg());
    const Task other = task == Task::kEre ? Task::kDrr : Task::kEre;
    const auto other_before = flatten(net.params().group(fine_group(other)));
    std::vector<std::vector<Real>> shared_before;
    for (ParamGroup g : kSharedGroups) shared_before.push_back(flatten(net.params().group(g)));
    const auto& src = task == Task::kEre ? corpus_.ere.train : corpus_.drr.train;
    trainer.train_step(slice(net, src, 8));
    EXPECT_EQ(flatten(net.params().group(fine_group(other))), other_before);
    for (std::size_t i = 0; i < 3; ++i) {
      EXPECT_NE(flatten(net.params().group(kSharedGroups[i])), shared_before[i]);
    }
  }
}

TEST_F(TrainerTest, StepRecordIdentity) {
  MkpNet net = make();
  TrainerConfig cfg = small_cfg();
  cfg.alpha = 0.7;
  cfg.lambda = 0.3;
  Trainer trainer(net, cfg);
  for (int i = 0; i < 5; ++i) {
    const StepRecord r = trainer.train_step(slice(net, corpus_.ere.train, 8));
    EXPECT_NEAR(r.combined, combined_loss(r.fine_ce, r.kl, r.coarse_ce, cfg), 1e-5);
    EXPECT_EQ(r.step, static_cast<std::size_t>(i));
    EXPECT_EQ(r.task, Task::kEre);
  }
}

TEST_F(TrainerTest, AlphaOneGivesZeroCoarseClassifierGradient) {
  MkpNet net = make();
  TrainerConfig cfg = small_cfg();
  cfg.alpha = 1;
  Trainer trainer(net, cfg);
  Rng rng(4);
  trainer.compute_step(slice(net, corpus_.ere.train, 8), rng);
  for (Tensor t : {net.coarse()->weight(), net.coarse()->bias()}) {
    if (!t.has_grad()) continue;
    for (Real g : t.grad()) EXPECT_EQ(g, 0);
  }
  // The label table still learns through the fine loss.
  double table = 0;
  for (Real g : net.coarse()->table().grad()) table += std::abs(g);
  EXPECT_GT(table, 0);
}

TEST_F(TrainerTest, EmptyOrMixedBatchRejected) {
  MkpNet net = make();
  Trainer trainer(net, small_cfg());
  EXPECT_THROW(trainer.train_step(std::vector<Example>{}), ConfigError);
  auto mixed = slice(net, corpus_.ere.train, 2);
  mixed.push_back(slice(net, corpus_.drr.train, 1).front());
  EXPECT_THROW(trainer.train_step(mixed), ConfigError);
}

TEST_F(TrainerTest, NoProjectionIgnoresDrrData) {
  const AblationConfig no_kp{true, true, false, false};
  MkpNet a = make(no_kp), b = make(no_kp);
  const auto ere = a.prepare(corpus_.ere.train), dev = a.prepare(corpus_.ere.dev);
  const auto drr = a.prepare(corpus_.drr.train);
  Trainer ta(a, small_cfg()), tb(b, small_cfg());
  const auto ra = ta.train(ere, drr, dev);
  const auto rb = tb.train(ere, {}, dev);
  EXPECT_EQ(flatten(a.params().all()), flatten(b.params().all()));
  for (const auto& s : ra.steps) EXPECT_EQ(s.task, Task::kEre);
  EXPECT_EQ(ra.steps.size(), rb.steps.size());
}

TEST_F(TrainerTest, ProjectionNeedsBothTasks) {
  MkpNet net = make();
  Trainer trainer(net, small_cfg());
  const auto ere = net.prepare(corpus_.ere.train), dev = net.prepare(corpus_.ere.dev);
  EXPECT_THROW(trainer.train(ere, {}, dev), ConfigError);
  const auto drr_dev = net.prepare(corpus_.drr.dev);
  EXPECT_THROW(trainer.train(ere, net.prepare(corpus_.drr.train), drr_dev), ConfigError);
}

TEST_F(TrainerTest, TrainAlternatesAndRestoresBest) {
  MkpNet net = make();
  Trainer trainer(net, small_cfg());
  const auto ere = net.prepare(corpus_.ere.train), drr = net.prepare(corpus_.drr.train);
  const auto dev = net.prepare(corpus_.ere.dev);
  std::ostringstream log;
  const TrainResult r = trainer.train(ere, drr, dev, &log);
  // 120 / 16 -> 8 batches per task per epoch, strictly alternating.
  ASSERT_EQ(r.steps.size(), 2u * 16u);
  for (std::size_t i = 0; i < 16; ++i) {
    EXPECT_EQ(r.steps[i].task, i % 2 == 0 ? Task::kEre : Task::kDrr);
  }
  ASSERT_EQ(r.epochs.size(), 2u);
  EXPECT_NEAR(evaluate_fine(net, dev, false).acc, r.best_dev_acc, 1e-12);
  std::size_t lines = 0;
  std::string line;
  std::istringstream in(log.str());
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    EXPECT_TRUE(j.at("type") == "step" || j.at("type") == "epoch");
    ++lines;
  }
  EXPECT_EQ(lines, 32u + 2u);
}

TEST_F(TrainerTest, IdenticalSeedsGiveIdenticalParameters) {
  std::vector<std::vector<Real>> finals;
  for (int run = 0; run < 2; ++run) {
    MkpNet net = make();
    Trainer trainer(net, small_cfg());
    trainer.train(net.prepare(corpus_.ere.train), net.prepare(corpus_.drr.train),
                  net.prepare(corpus_.ere.dev));
    finals.push_back(flatten(net.params().all()));
  }
  EXPECT_EQ(finals[0], finals[1]);
}

TEST_F(TrainerTest, BothTasksReachSharedParameters) {
  for (Task task : {Task::kEre, Task::kDrr}) {
    MkpNet net = make();
    Trainer trainer(net, small_cfg());
    Rng rng(3);
    const auto& src = task == Task::kEre ? corpus_.ere.train : corpus_.drr.train;
    trainer.compute_step(slice(net, src, 8), rng);
    for (ParamGroup g : kSharedGroups) {
      double norm = 0;
      for (const auto& p : net.params().group(g)) {
        if (p.tensor.has_grad()) {
          for (Real v : p.tensor.grad()) norm += std::abs(v);
        }
      }
      EXPECT_GT(norm, 0) << group_name(g) << " via " << task_name(task);
    }
    zero_grads(net.params().all());
  }
}

}  // namespace
}  // namespace mkp
