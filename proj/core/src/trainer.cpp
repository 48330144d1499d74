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
#include "mkp/trainer.hpp"

#include <cmath>
#include <numeric>

#include "mkp/metrics.hpp"
#include "mkp/ops.hpp"

MKP_NAMESPACE_BEGIN

namespace {

using ojson = nlohmann::ordered_json;

std::vector<std::vector<std::size_t>> make_batches(std::size_t n, std::size_t batch_size,
                                                   Rng& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(std::span<std::size_t>(order));
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < n; i += batch_size) {
    out.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(i),
                     order.begin() + static_cast<std::ptrdiff_t>(std::min(n, i + batch_size)));
  }
  return out;
}

std::vector<Real> snapshot(const std::vector<NamedTensor>& params) {
  std::vector<Real> out;
  for (const auto& p : params) {
    auto v = p.tensor.values();
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

void restore(const std::vector<NamedTensor>& params, const std::vector<Real>& values) {
  std::size_t off = 0;
  for (const auto& p : params) {
    auto dst = p.tensor.impl()->value.data();
    std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(off), p.tensor.numel(), dst);
    off += p.tensor.numel();
  }
}

}  // namespace

void TrainerConfig::validate() const {
  if (!std::isfinite(alpha) || alpha < 0 || alpha > 1) throw ConfigError("trainer alpha must be in [0, 1]");
  if (!std::isfinite(lambda) || lambda < 0) throw ConfigError("trainer lambda must be finite and >= 0");
  if (!std::isfinite(lr) || lr <= 0) throw ConfigError("trainer lr must be positive");
  if (batch_size == 0) throw ConfigError("trainer batch_size must be positive");
  if (epochs == 0) throw ConfigError("trainer epochs must be positive");
  if (ratio_ere == 0 || ratio_drr == 0) throw ConfigError("trainer ratio entries must be positive");
  if (!std::isfinite(clip_norm)) throw ConfigError("trainer clip_norm must be finite");
}

ojson to_json(const TrainerConfig& c) {
  return {{"alpha", c.alpha},
          {"lambda", c.lambda},
          {"lr", c.lr},
          {"batch_size", c.batch_size},
          {"epochs", c.epochs},
          {"ratio", {c.ratio_ere, c.ratio_drr}},
          {"seed", c.seed},
          {"teacher_forcing", c.teacher_forcing},
          {"clip_norm", c.clip_norm},
          {"target_task", std::string(task_name(c.target_task))}};
}

TrainerConfig trainer_config_from_json(const nlohmann::json& j) {
  static const char* kKeys[] = {"alpha",  "lambda", "lr",   "batch_size", "epochs", "ratio",
                                "seed",   "teacher_forcing", "clip_norm", "target_task"};
  if (!j.is_object()) throw ConfigError("trainer config must be a JSON object");
  for (const auto& [k, v] : j.items()) {
    if (std::find(std::begin(kKeys), std::end(kKeys), k) == std::end(kKeys)) {
      throw ConfigError("unknown key '" + k + "' in trainer config");
    }
  }
  TrainerConfig c;
  try {
    c.alpha = j.value("alpha", c.alpha);
    c.lambda = j.value("lambda", c.lambda);
    c.lr = j.value("lr", c.lr);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.epochs = j.value("epochs", c.epochs);
    if (j.contains("ratio")) {
      const auto& r = j.at("ratio");
      if (!r.is_array() || r.size() != 2) throw ConfigError("trainer ratio must be [ere, drr]");
      c.ratio_ere = r[0].get<std::size_t>();
      c.ratio_drr = r[1].get<std::size_t>();
    }
    c.seed = j.value("seed", c.seed);
    c.teacher_forcing = j.value("teacher_forcing", c.teacher_forcing);
    c.clip_norm = j.value("clip_norm", c.clip_norm);
    if (j.contains("target_task")) {
      const auto t = parse_task(j.at("target_task").get<std::string>());
      if (!t) throw ConfigError("trainer target_task must be ERE or DRR");
      c.target_task = *t;
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad trainer config value: ") + e.what());
  }
  c.validate();
  return c;
}

ojson StepRecord::to_json() const {
  return {{"type", "step"},       {"step", step}, {"task", std::string(task_name(task))},
          {"fine_ce", fine_ce},   {"coarse_ce", coarse_ce}, {"kl", kl},
          {"combined", combined}, {"grad_norm", grad_norm}};
}

ojson EpochRecord::to_json() const {
  return {{"type", "epoch"},     {"epoch", epoch},   {"steps", steps}, {"mean_loss", mean_loss},
          {"dev_acc", dev_acc},  {"dev_f1", dev_f1}, {"best", best}};
}

double combined_loss(double fine_ce, double kl, double coarse_ce, const TrainerConfig& cfg) {
  return cfg.alpha * (fine_ce + cfg.lambda * kl) + (1 - cfg.alpha) * coarse_ce;
}

Tensor combined_loss(const Tensor& fine_ce, const Tensor& kl, const Tensor& coarse_ce,
                     const TrainerConfig& cfg) {
  const Real a = static_cast<Real>(cfg.alpha);
  const Tensor fine_part =
      ops::scale(ops::add(fine_ce, ops::scale(kl, static_cast<Real>(cfg.lambda))), a);
  return ops::add(fine_part, ops::scale(coarse_ce, static_cast<Real>(1 - cfg.alpha)));
}

std::vector<Task> round_robin_schedule(std::size_t ere_batches, std::size_t drr_batches,
                                       std::size_t ratio_ere, std::size_t ratio_drr) {
  if (ratio_ere == 0 || ratio_drr == 0) throw ConfigError("schedule ratio entries must be positive");
  std::vector<Task> out;
  out.reserve(ere_batches + drr_batches);
  while (ere_batches > 0 || drr_batches > 0) {
    for (std::size_t i = 0; i < ratio_ere && ere_batches > 0; ++i, --ere_batches) {
      out.push_back(Task::kEre);
    }
    for (std::size_t i = 0; i < ratio_drr && drr_batches > 0; ++i, --drr_batches) {
      out.push_back(Task::kDrr);
    }
  }
  return out;
}

Trainer::Trainer(MkpNet& net, const TrainerConfig& cfg)
    : net_(net),
      cfg_(cfg),
      ere_shuffle_(0),
      drr_shuffle_(0),
      ere_latent_(0),
      drr_latent_(0) {
  cfg_.validate();
  optim_.lr = cfg_.lr;
  Rng root(cfg_.seed);
  ere_shuffle_ = root.split();
  drr_shuffle_ = root.split();
  ere_latent_ = root.split();
  drr_latent_ = root.split();
}

std::vector<NamedTensor> Trainer::trainable(Task task) const {
  const ParamGroup groups[] = {ParamGroup::kBert, ParamGroup::kSemantic, ParamGroup::kCoarse,
                               fine_group(task)};
  return net_.params().groups(groups);
}

StepRecord Trainer::compute_step(std::span<const Example> batch, Rng& latent_rng) {
  if (batch.empty()) throw ConfigError("train_step on an empty batch");
  const ForwardOutput out = net_.forward_train(batch, latent_rng, cfg_.teacher_forcing);
  const Tensor loss = combined_loss(out.fine_ce, out.kl, out.coarse_ce, cfg_);
  backward(loss);
  StepRecord rec;
  rec.step = step_;
  rec.task = batch.front().task;
  rec.fine_ce = out.fine_ce.item();
  rec.coarse_ce = out.coarse_ce.item();
  rec.kl = out.kl.item();
  rec.combined = loss.item();
  return rec;
}

StepRecord Trainer::train_step(std::span<const Example> batch) {
  if (batch.empty()) throw ConfigError("train_step on an empty batch");
  const Task task = batch.front().task;
  const auto params = trainable(task);
  zero_grads(params);
  StepRecord rec = compute_step(batch, task == Task::kEre ? ere_latent_ : drr_latent_);
  // Parameters outside the graph for this batch (e.g. the coarse head at
  // alpha = 0 without a path) still need a gradient buffer for Adam.
  for (const auto& p : params) p.tensor.impl()->grad_buffer();
  rec.grad_norm = clip_grad_norm(params, cfg_.clip_norm);
  optimizer_step(params, optim_);
  ++step_;
  return rec;
}

TrainResult Trainer::train(std::span<const Example> ere_train, std::span<const Example> drr_train,
                           std::span<const Example> dev, std::ostream* log) {
  const bool projection = net_.ablation().use_projection;
  const Task target = cfg_.target_task;
  const Task other = target == Task::kEre ? Task::kDrr : Task::kEre;
  auto data_for = [&](Task t) { return t == Task::kEre ? ere_train : drr_train; };
  if (data_for(target).empty()) throw ConfigError("no training data for the target task");
  if (projection && data_for(other).empty()) {
    throw ConfigError("knowledge projection needs training data for both tasks");
  }
  for (const auto& ex : dev) {
    if (ex.task != target) throw ConfigError("dev set must hold target-task instances only");
  }

  const auto all_params = net_.params().all();
  TrainResult result;
  std::vector<Real> best;
  for (std::size_t epoch = 1; epoch <= cfg_.epochs; ++epoch) {
    auto ere_batches = make_batches(ere_train.size(), cfg_.batch_size, ere_shuffle_);
    auto drr_batches = make_batches(drr_train.size(), cfg_.batch_size, drr_shuffle_);
    if (!projection) (target == Task::kEre ? drr_batches : ere_batches).clear();
    const auto schedule = round_robin_schedule(ere_batches.size(), drr_batches.size(),
                                               cfg_.ratio_ere, cfg_.ratio_drr);
    std::size_t next_ere = 0, next_drr = 0;
    double loss_sum = 0;
    std::vector<Example> batch;
    for (Task t : schedule) {
      const auto& idx = t == Task::kEre ? ere_batches[next_ere++] : drr_batches[next_drr++];
      const auto source = data_for(t);
      batch.clear();
      for (std::size_t i : idx) batch.push_back(source[i]);
      StepRecord rec = train_step(batch);
      loss_sum += rec.combined;
      if (log) *log << rec.to_json().dump() << '\n';
      result.steps.push_back(rec);
    }

    EpochRecord er;
    er.epoch = epoch;
    er.steps = schedule.size();
    er.mean_loss = schedule.empty() ? 0 : loss_sum / static_cast<double>(schedule.size());
    if (!dev.empty()) {
      const DevScore s = evaluate_fine(net_, dev, false);
      er.dev_acc = s.acc;
      er.dev_f1 = s.f1;
    }
    if (er.dev_acc > result.best_dev_acc) {
      er.best = true;
      result.best_dev_acc = er.dev_acc;
      result.best_epoch = epoch;
      best = snapshot(all_params);
    }
    if (log) *log << er.to_json().dump() << '\n';
    result.epochs.push_back(er);
  }
  restore(all_params, best);
  return result;
}

DevScore evaluate_fine(const MkpNet& net, std::span<const Example> data, bool oracle_coarse) {
  if (data.empty()) throw DataError("evaluation set is empty");
  const auto preds = net.predict(data, oracle_coarse);
  std::vector<int> gold, pred;
  for (std::size_t i = 0; i < data.size(); ++i) {
    gold.push_back(data[i].fine);
    pred.push_back(preds[i].fine);
  }
  const auto labels = label_range(net.specs().get(data.front().task).size());
  return {accuracy(gold, pred), macro_f1(gold, pred, labels)};
}

MKP_NAMESPACE_END
