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
#ifndef MKP_TRAINER_HPP_
#define MKP_TRAINER_HPP_

#include <cstdint>
#include <nlohmann/json.hpp>
#include <ostream>
#include <span>
#include <vector>

#include "mkp/model.hpp"
#include "mkp/optim.hpp"

MKP_NAMESPACE_BEGIN

struct TrainerConfig {
  double alpha = 0.9;
  double lambda = 0.5;
  double lr = 1e-3;
  std::size_t batch_size = 32;
  std::size_t epochs = 20;
  std::size_t ratio_ere = 1;  // ERE batches per round
  std::size_t ratio_drr = 1;  // DRR batches per round
  std::uint64_t seed = 13;
  bool teacher_forcing = true;
  double clip_norm = 5.0;  // <= 0 disables clipping
  Task target_task = Task::kEre;

  void validate() const;
};

nlohmann::ordered_json to_json(const TrainerConfig& c);
TrainerConfig trainer_config_from_json(const nlohmann::json& j);

struct StepRecord {
  std::size_t step = 0;
  Task task = Task::kEre;
  double fine_ce = 0;
  double coarse_ce = 0;
  double kl = 0;
  double combined = 0;   // value of the loss tensor that was backpropagated
  double grad_norm = 0;  // before clipping

  nlohmann::ordered_json to_json() const;
};

struct EpochRecord {
  std::size_t epoch = 0;
  std::size_t steps = 0;
  double mean_loss = 0;
  double dev_acc = 0;
  double dev_f1 = 0;
  bool best = false;

  nlohmann::ordered_json to_json() const;
};

struct TrainResult {
  std::vector<StepRecord> steps;
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;
  double best_dev_acc = -1;
};

// alpha * (fine + lambda * kl) + (1 - alpha) * coarse
double combined_loss(double fine_ce, double kl, double coarse_ce, const TrainerConfig& cfg);
Tensor combined_loss(const Tensor& fine_ce, const Tensor& kl, const Tensor& coarse_ce,
                     const TrainerConfig& cfg);

// Round-robin interleaving: `ratio_ere` ERE batches, then `ratio_drr` DRR
// batches, repeated; once one task runs out the other continues alone.
std::vector<Task> round_robin_schedule(std::size_t ere_batches, std::size_t drr_batches,
                                       std::size_t ratio_ere, std::size_t ratio_drr);

class Trainer {
 public:
  Trainer(MkpNet& net, const TrainerConfig& cfg);

  // Forward and backward on one single-task batch without updating
  // anything; gradients are left on the parameters.
  StepRecord compute_step(std::span<const Example> batch, Rng& latent_rng);

  // compute_step, global-norm clipping and an Adam update restricted to
  // the shared groups and the batch task's fine classifier.
  StepRecord train_step(std::span<const Example> batch);

  // Full alternating schedule with per-epoch dev evaluation on the target
  // task; the best-dev parameters are restored before returning. DRR data
  // is ignored when the model's projection flag is off.
  TrainResult train(std::span<const Example> ere_train, std::span<const Example> drr_train,
                    std::span<const Example> dev, std::ostream* log = nullptr);

  std::vector<NamedTensor> trainable(Task task) const;
  const TrainerConfig& config() const { return cfg_; }
  OptimState& optimizer() { return optim_; }
  std::size_t steps_taken() const { return step_; }

 private:
  MkpNet& net_;
  TrainerConfig cfg_;
  OptimState optim_;
  Rng ere_shuffle_, drr_shuffle_, ere_latent_, drr_latent_;
  std::size_t step_ = 0;
};

struct DevScore {
  double acc = 0;
  double f1 = 0;
};
DevScore evaluate_fine(const MkpNet& net, std::span<const Example> data, bool oracle_coarse);

MKP_NAMESPACE_END

#endif  // MKP_TRAINER_HPP_
