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
#ifndef MKP_MODEL_HPP_
#define MKP_MODEL_HPP_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <nlohmann/json.hpp>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mkp/coarse.hpp"
#include "mkp/data.hpp"
#include "mkp/encoder.hpp"
#include "mkp/optim.hpp"
#include "mkp/semantic.hpp"
#include "mkp/task.hpp"
#include "mkp/vocab.hpp"

MKP_NAMESPACE_BEGIN

enum class ParamGroup { kBert, kSemantic, kCoarse, kFineEre, kFineDrr };

std::string_view group_name(ParamGroup group);
ParamGroup fine_group(Task task);
inline constexpr ParamGroup kSharedGroups[] = {ParamGroup::kBert, ParamGroup::kSemantic,
                                               ParamGroup::kCoarse};

// Named parameter groups. A parameter (by name and by storage) belongs to
// exactly one group.
class ParamGroups {
 public:
  struct Entry {
    std::string name;
    ParamGroup group;
    Tensor tensor;
  };

  void add(ParamGroup group, const std::vector<NamedTensor>& params);

  std::vector<NamedTensor> group(ParamGroup group) const;
  std::vector<NamedTensor> groups(std::span<const ParamGroup> groups) const;
  std::vector<NamedTensor> all() const;
  // Scalar count of one group.
  std::size_t count(ParamGroup group) const;
  std::size_t total() const;
  const std::vector<Entry>& entries() const { return entries_; }

 private:
  std::vector<Entry> entries_;
};

struct ModelConfig {
  std::size_t layers = 2;
  std::size_t heads = 4;
  std::size_t d_model = 64;
  std::size_t d_z = 32;
  std::size_t d_label = 32;
  std::size_t d_coarse = 32;
  std::size_t max_len = 64;
  std::size_t vocab_cap = 8192;

  void validate() const;
};

// Ablation switches: semantic adaptor (SA), coarse category
// adaptor (CA), cross-task knowledge projection (KP), and the oracle that
// feeds gold coarse labels at test time.
struct AblationConfig {
  bool use_semantic = true;
  bool use_coarse = true;
  bool use_projection = true;
  bool gold_coarse_at_test = false;

  void validate() const;
  bool operator==(const AblationConfig&) const = default;
};

// A prepared instance: tokens plus label ids (-1 when unlabelled).
struct Example {
  TokenizedPair tokens;
  Task task = Task::kEre;
  int fine = -1;
  int coarse = -1;
};

struct ForwardOutput {
  Tensor fine_logits;    // [B, |fine labels|]
  Tensor coarse_logits;  // [B, 4]; undefined without the coarse adaptor
  Tensor fine_ce;        // batch mean
  Tensor coarse_ce;      // batch mean; constant 0 without the coarse adaptor
  Tensor kl;             // batch mean; constant 0 without the semantic adaptor
  std::vector<Real> eps; // latent noise drawn for this batch
};

struct Prediction {
  int fine = -1;
  int coarse = -1;  // -1 without the coarse adaptor
  std::vector<Real> fine_probs;
  std::vector<Real> coarse_probs;
};

// Per-task output layer: label embedding (used by the posterior, present
// only with the semantic adaptor) and an affine classifier over the
// assembled feature vector.
struct FineClassifier {
  Tensor label_embedding;  // [|labels|, d_label]
  Tensor weight;           // [feature_dim, |labels|]
  Tensor bias;             // [|labels|]

  std::vector<NamedTensor> parameters(const std::string& prefix) const;
};

// [h_cls ; h_z ; h_yc] restricted to the enabled adaptors, in that order.
// Throws ConfigError when an enabled component is missing.
Tensor assemble_features(const Tensor& h_cls, const Tensor& h_z, const Tensor& h_yc,
                         const AblationConfig& cfg);

class MkpNet {
 public:
  MkpNet(const ModelConfig& model, const AblationConfig& ablation, TaskSpecs specs,
         Vocab vocab, std::uint64_t init_seed);

  // Tokenizes and resolves labels (left at -1 when the pair has none).
  Example prepare(const InstancePair& pair) const;
  std::vector<Example> prepare(std::span<const InstancePair> pairs) const;

  // Training-time pass over a single-task batch: posterior latent sampled
  // from `rng`; the fine classifier sees the gold coarse embedding when
  // `teacher_forcing`, the predicted one otherwise.
  ForwardOutput forward_train(std::span<const Example> batch, Rng& rng,
                              bool teacher_forcing = true) const;

  // Deterministic inference; h_z is the prior mean. `oracle_coarse`
  // replaces the predicted coarse label with the gold one (required).
  std::vector<Prediction> predict(std::span<const Example> batch, bool oracle_coarse) const;
  std::vector<Prediction> predict(std::span<const Example> batch) const {
    return predict(batch, ablation_.gold_coarse_at_test);
  }

  const ModelConfig& model_config() const { return model_; }
  const AblationConfig& ablation() const { return ablation_; }
  const TaskSpecs& specs() const { return specs_; }
  const Vocab& vocab() const { return vocab_; }
  std::size_t feature_dim() const;

  ParamGroups& params() { return params_; }
  const ParamGroups& params() const { return params_; }
  const Encoder& encoder() const { return *encoder_; }
  SemanticHeads* semantic() { return semantic_.get(); }
  CoarseHeads* coarse() { return coarse_.get(); }
  FineClassifier& fine(Task task) { return task == Task::kEre ? fine_ere_ : fine_drr_; }
  const FineClassifier& fine(Task task) const {
    return task == Task::kEre ? fine_ere_ : fine_drr_;
  }

  // Checkpoint + vocab.txt + model.json (task specs, ablation, model
  // hyperparameters, vocab hash, and `extra` such as trainer settings).
  void save(const std::filesystem::path& dir,
            const nlohmann::ordered_json& extra = nlohmann::ordered_json::object()) const;
  static MkpNet load(const std::filesystem::path& dir);

 private:
  struct Encoded {
    Tensor h_cls;
    std::vector<int> fine;
    std::vector<int> coarse;
  };
  Encoded encode_batch(std::span<const Example> batch, bool need_labels) const;

  ModelConfig model_;
  AblationConfig ablation_;
  TaskSpecs specs_;
  Vocab vocab_;
  ParamGroups params_;
  std::unique_ptr<Encoder> encoder_;
  std::unique_ptr<SemanticHeads> semantic_;
  std::unique_ptr<CoarseHeads> coarse_;
  FineClassifier fine_ere_;
  FineClassifier fine_drr_;
};

nlohmann::ordered_json to_json(const ModelConfig& c);
ModelConfig model_config_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const AblationConfig& c);
AblationConfig ablation_from_json(const nlohmann::json& j);

MKP_NAMESPACE_END

#endif  // MKP_MODEL_HPP_
