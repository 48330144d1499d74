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
#ifndef MKP_ABLATION_HPP_
#define MKP_ABLATION_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <nlohmann/json.hpp>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mkp/data.hpp"
#include "mkp/model.hpp"
#include "mkp/trainer.hpp"

MKP_NAMESPACE_BEGIN

struct EvalRow {
  std::string config;
  double acc = 0;
  double f1 = 0;        // macro
  double micro_f1 = 0;
  std::optional<double> coarse_acc;  // only with the coarse adaptor
  std::optional<double> coarse_f1;
  std::optional<double> delta_acc;   // vs the report baseline
  std::optional<double> delta_f1;
  std::optional<double> p_value;     // accuracy difference vs the baseline
};

struct EvalReport {
  std::string baseline;
  std::size_t n_test = 0;
  std::vector<EvalRow> rows;

  const EvalRow& row(const std::string& config) const;
  bool has_row(const std::string& config) const;
  // Fills delta_acc / delta_f1 of every non-baseline row.
  void compute_deltas();
  void validate() const;
  // Columns: config, acc, f1, coarse_acc, coarse_f1, delta_acc, delta_f1.
  std::string to_tsv() const;
  nlohmann::ordered_json to_json() const;
};

struct ModelEval {
  EvalRow row;
  std::vector<int> gold;
  std::vector<int> pred;
};

// Scores fine (and, with the coarse adaptor, coarse) predictions on a
// single-task labelled set.
ModelEval evaluate_model(const MkpNet& net, std::span<const Example> data, bool oracle_coarse,
                         const std::string& name);

inline constexpr const char* kRowBertCls = "BERT-CLS";
inline constexpr const char* kRowNoKp = "MKPNet w/o KP";
inline constexpr const char* kRowNoSaCa = "MKPNet w/o SA & CA";
inline constexpr const char* kRowNoCa = "MKPNet w/o CA";
inline constexpr const char* kRowNoSa = "MKPNet w/o SA";
inline constexpr const char* kRowFull = "MKPNet";
inline constexpr const char* kRowOracle = "MKPNet w/o SA*";

struct GridVariant {
  std::string name;
  std::string slug;        // directory name for per-variant artifacts
  AblationConfig ablation;
  std::string reuse;       // non-empty: evaluate that variant's model instead of training
};

// The seven report rows, in report order. The oracle row reuses the
// w/o SA model and swaps in gold coarse labels at test time.
std::vector<GridVariant> grid_variants();

struct GridData {
  TaskSpecs specs;
  std::vector<InstancePair> ere_train, ere_dev, ere_test;
  std::vector<InstancePair> drr_train, drr_dev, drr_test;
};

struct GridOptions {
  ModelConfig model;
  TrainerConfig trainer;
  std::size_t jobs = 1;
  std::size_t significance_iterations = 10000;
  std::vector<std::string> only;     // restrict to these rows; empty = all
  std::filesystem::path out_dir;     // per-variant logs and models when set
  std::function<void(const std::string&)> progress;
};

// Vocabulary over both tasks' training arguments.
Vocab build_vocab(const GridData& data, std::size_t cap);

// Seed for parameter initialization derived from the run seed, so the
// init stream never coincides with the trainer's shuffle stream.
std::uint64_t model_init_seed(std::uint64_t run_seed);

EvalReport ablation_grid(const GridData& data, const GridOptions& options);

MKP_NAMESPACE_END

#endif  // MKP_ABLATION_HPP_
