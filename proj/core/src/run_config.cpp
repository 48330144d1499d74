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
#include "mkp/run_config.hpp"

#include <fstream>

MKP_NAMESPACE_BEGIN

namespace {

using ojson = nlohmann::ordered_json;

void only_keys(const nlohmann::json& j, std::initializer_list<std::string_view> keys,
               const std::string& section) {
  if (!j.is_object()) throw ConfigError(section + " must be a JSON object");
  for (const auto& [k, v] : j.items()) {
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
      throw ConfigError("unknown key '" + k + "' in " + section);
    }
  }
}

}  // namespace

ojson to_json(const SynthSpec& s) {
  return {{"n_train", s.n_train}, {"n_dev", s.n_dev}, {"n_test", s.n_test},
          {"seed", s.seed},       {"noise", s.noise}};
}

SynthSpec synth_spec_from_json(const nlohmann::json& j) {
  only_keys(j, {"n_train", "n_dev", "n_test", "seed", "noise"}, "data.synth");
  SynthSpec s;
  try {
    s.n_train = j.value("n_train", s.n_train);
    s.n_dev = j.value("n_dev", s.n_dev);
    s.n_test = j.value("n_test", s.n_test);
    s.seed = j.value("seed", s.seed);
    s.noise = j.value("noise", s.noise);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad data.synth value: ") + e.what());
  }
  return s;
}

void RunConfig::validate() const {
  model.validate();
  trainer.validate();
  ablation.validate();
  enrichment.validate();
  if (data.manifest.empty()) data.synth.validate(default_task_specs());
  if (significance_iterations < 1000) {
    throw ConfigError("evaluation.significance_iterations must be at least 1000");
  }
}

ojson RunConfig::to_json() const {
  ojson d = ojson::object();
  if (data.manifest.empty()) {
    d["synth"] = mkp::to_json(data.synth);
  } else {
    d["manifest"] = data.manifest.string();
  }
  return {{"model", mkp::to_json(model)},
          {"trainer", mkp::to_json(trainer)},
          {"data", d},
          {"ablation", mkp::to_json(ablation)},
          {"enrichment", {{"core", enrichment.core}, {"high", enrichment.high}, {"full", enrichment.full}}},
          {"evaluation", {{"significance_iterations", significance_iterations}}}};
}

RunConfig RunConfig::from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  only_keys(j, {"model", "trainer", "data", "ablation", "enrichment", "evaluation"}, "run config");
  RunConfig c;
  if (j.contains("model")) c.model = model_config_from_json(j.at("model"));
  if (j.contains("trainer")) c.trainer = trainer_config_from_json(j.at("trainer"));
  if (j.contains("ablation")) c.ablation = ablation_from_json(j.at("ablation"));
  if (j.contains("data")) {
    const auto& d = j.at("data");
    only_keys(d, {"manifest", "synth"}, "data");
    if (d.contains("manifest") && d.contains("synth")) {
      throw ConfigError("data section takes either 'manifest' or 'synth', not both");
    }
    if (d.contains("manifest")) {
      if (!d.at("manifest").is_string()) throw ConfigError("data.manifest must be a path string");
      std::filesystem::path p = d.at("manifest").get<std::string>();
      c.data.manifest = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    }
    if (d.contains("synth")) c.data.synth = synth_spec_from_json(d.at("synth"));
  }
  try {
    if (j.contains("enrichment")) {
      const auto& e = j.at("enrichment");
      only_keys(e, {"core", "high", "full"}, "enrichment");
      c.enrichment.core = e.value("core", c.enrichment.core);
      c.enrichment.high = e.value("high", c.enrichment.high);
      c.enrichment.full = e.value("full", c.enrichment.full);
    }
    if (j.contains("evaluation")) {
      const auto& e = j.at("evaluation");
      only_keys(e, {"significance_iterations"}, "evaluation");
      c.significance_iterations = e.value("significance_iterations", c.significance_iterations);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed config " + path.string() + ": " + e.what());
  }
  return RunConfig::from_json(j, path.parent_path());
}

GridData load_grid_data(const DataConfig& data) {
  if (data.manifest.empty()) return grid_data_from(synth_generate(data.synth));
  const DatasetManifest m = load_manifest(data.manifest);
  GridData g;
  g.specs = m.specs;
  g.ere_train = load_split(data.manifest, m, "ere_train");
  g.ere_dev = load_split(data.manifest, m, "ere_dev");
  g.ere_test = load_split(data.manifest, m, "ere_test");
  g.drr_train = load_split(data.manifest, m, "drr_train");
  g.drr_dev = load_split(data.manifest, m, "drr_dev");
  g.drr_test = load_split(data.manifest, m, "drr_test");
  return g;
}

GridData grid_data_from(const SynthCorpus& corpus) {
  GridData g;
  g.specs = corpus.specs;
  g.ere_train = corpus.ere.train;
  g.ere_dev = corpus.ere.dev;
  g.ere_test = corpus.ere.test;
  g.drr_train = corpus.drr.train;
  g.drr_dev = corpus.drr.dev;
  g.drr_test = corpus.drr.test;
  return g;
}

MKP_NAMESPACE_END
