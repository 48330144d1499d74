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
#ifndef MKP_RUN_CONFIG_HPP_
#define MKP_RUN_CONFIG_HPP_

#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>

#include "mkp/ablation.hpp"
#include "mkp/enrich.hpp"
#include "mkp/model.hpp"
#include "mkp/synth.hpp"
#include "mkp/trainer.hpp"

MKP_NAMESPACE_BEGIN

// Either a dataset manifest or a synthetic corpus spec (the default).
struct DataConfig {
  std::filesystem::path manifest;  // empty: generate from `synth`
  SynthSpec synth;
};

// One JSON document with sections model, trainer, data, ablation,
// enrichment and evaluation. Unknown keys are rejected; to_json emits
// every field, defaults included.
struct RunConfig {
  ModelConfig model;
  TrainerConfig trainer;
  DataConfig data;
  AblationConfig ablation;
  TierThresholds enrichment;
  std::size_t significance_iterations = 10000;

  void validate() const;
  nlohmann::ordered_json to_json() const;
  // A relative manifest path is resolved against `base_dir`.
  static RunConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
};

RunConfig load_run_config(const std::filesystem::path& path);

nlohmann::ordered_json to_json(const SynthSpec& s);
SynthSpec synth_spec_from_json(const nlohmann::json& j);

// Loads the six splits named in the data section (train/dev/test per task).
GridData load_grid_data(const DataConfig& data);
GridData grid_data_from(const SynthCorpus& corpus);

MKP_NAMESPACE_END

#endif  // MKP_RUN_CONFIG_HPP_
