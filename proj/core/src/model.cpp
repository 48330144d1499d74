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
#include "mkp/model.hpp"

#include <fstream>
#include <set>

#include "mkp/checkpoint.hpp"
#include "mkp/init.hpp"
#include "mkp/ops.hpp"

MKP_NAMESPACE_BEGIN

namespace {

using ojson = nlohmann::ordered_json;

constexpr std::size_t kPredictChunk = 128;

void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<const char*> known,
                         const std::string& section) {
  if (!j.is_object()) throw ConfigError(section + " must be a JSON object");
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (const char* name : known) ok = ok || k == name;
    if (!ok) throw ConfigError("unknown key '" + k + "' in " + section);
  }
}

template <typename T>
void read_opt(const nlohmann::json& j, const char* key, T& out, const std::string& section) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("bad value for '" + std::string(key) + "' in " + section);
  }
}

}  // namespace

std::string_view group_name(ParamGroup group) {
  switch (group) {
    case ParamGroup::kBert: return "bert";
    case ParamGroup::kSemantic: return "semantic";
    case ParamGroup::kCoarse: return "coarse";
    case ParamGroup::kFineEre: return "fine_ere";
    case ParamGroup::kFineDrr: return "fine_drr";
  }
  return "?";
}

ParamGroup fine_group(Task task) {
  return task == Task::kEre ? ParamGroup::kFineEre : ParamGroup::kFineDrr;
}

void ParamGroups::add(ParamGroup group, const std::vector<NamedTensor>& params) {
  for (const auto& p : params) {
    for (const auto& e : entries_) {
      if (e.name == p.name || e.tensor.same_storage(p.tensor)) {
        throw ConfigError("parameter '" + p.name + "' registered twice");
      }
    }
    entries_.push_back({p.name, group, p.tensor});
  }
}

std::vector<NamedTensor> ParamGroups::group(ParamGroup group) const {
  std::vector<NamedTensor> out;
  for (const auto& e : entries_) {
    if (e.group == group) out.push_back({e.name, e.tensor});
  }
  return out;
}

std::vector<NamedTensor> ParamGroups::groups(std::span<const ParamGroup> groups) const {
  std::vector<NamedTensor> out;
  for (const auto& e : entries_) {
    if (std::find(groups.begin(), groups.end(), e.group) != groups.end()) {
      out.push_back({e.name, e.tensor});
    }
  }
  return out;
}

std::vector<NamedTensor> ParamGroups::all() const {
  std::vector<NamedTensor> out;
  for (const auto& e : entries_) out.push_back({e.name, e.tensor});
  return out;
}

std::size_t ParamGroups::count(ParamGroup group) const {
  std::size_t n = 0;
  for (const auto& e : entries_) {
    if (e.group == group) n += e.tensor.numel();
  }
  return n;
}

std::size_t ParamGroups::total() const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.tensor.numel();
  return n;
}

void ModelConfig::validate() const {
  if (layers == 0 || heads == 0 || d_model == 0 || d_z == 0 || d_label == 0 ||
      d_coarse == 0) {
    throw ConfigError("model dimensions must be positive");
  }
  if (d_model % heads != 0) throw ConfigError("model d_model must be divisible by heads");
  if (max_len < 5) throw ConfigError("model max_len must be at least 5");
  if (vocab_cap < 5) throw ConfigError("model vocab_cap must exceed the reserved tokens");
}

void AblationConfig::validate() const {
  if (gold_coarse_at_test && !use_coarse) {
    throw ConfigError("gold coarse labels at test time require the coarse adaptor");
  }
}

std::vector<NamedTensor> FineClassifier::parameters(const std::string& prefix) const {
  std::vector<NamedTensor> out;
  if (label_embedding.defined()) out.push_back({prefix + "label_embedding", label_embedding});
  out.push_back({prefix + "weight", weight});
  out.push_back({prefix + "bias", bias});
  return out;
}

Tensor assemble_features(const Tensor& h_cls, const Tensor& h_z, const Tensor& h_yc,
                         const AblationConfig& cfg) {
  if (!h_cls.defined()) throw ConfigError("assemble_features: h_cls missing");
  std::vector<Tensor> parts{h_cls};
  if (cfg.use_semantic) {
    if (!h_z.defined()) throw ConfigError("assemble_features: h_z missing with semantic adaptor on");
    parts.push_back(h_z);
  }
  if (cfg.use_coarse) {
    if (!h_yc.defined()) throw ConfigError("assemble_features: h_yc missing with coarse adaptor on");
    parts.push_back(h_yc);
  }
  if (parts.size() == 1) return h_cls;
  return ops::concat(std::span<const Tensor>(parts));
}

MkpNet::MkpNet(const ModelConfig& model, const AblationConfig& ablation, TaskSpecs specs,
               Vocab vocab, std::uint64_t init_seed)
    : model_(model), ablation_(ablation), specs_(std::move(specs)), vocab_(std::move(vocab)) {
  model_.validate();
  ablation_.validate();
  specs_.ere.validate();
  specs_.drr.validate();
  if (specs_.ere.task != Task::kEre || specs_.drr.task != Task::kDrr) {
    throw ConfigError("task specs must be (ERE, DRR)");
  }
  // Each component draws from its own stream, so disabling an adaptor does
  // not change the initialization of the others.
  Rng root(init_seed);
  Rng enc_rng = root.split(), sem_rng = root.split(), coarse_rng = root.split();
  Rng ere_rng = root.split(), drr_rng = root.split();

  EncoderConfig ec{model_.layers, model_.heads, model_.d_model, model_.max_len, vocab_.size()};
  encoder_ = std::make_unique<Encoder>(ec, enc_rng);
  params_.add(ParamGroup::kBert, encoder_->parameters());

  if (ablation_.use_semantic) {
    semantic_ = std::make_unique<SemanticHeads>(
        SemanticConfig{model_.d_model, model_.d_label, model_.d_z}, sem_rng);
    params_.add(ParamGroup::kSemantic, semantic_->parameters());
  }
  if (ablation_.use_coarse) {
    const std::size_t in = model_.d_model + (ablation_.use_semantic ? model_.d_z : 0);
    coarse_ = std::make_unique<CoarseHeads>(in, model_.d_coarse, coarse_rng);
    params_.add(ParamGroup::kCoarse, coarse_->parameters());
  }
  const std::size_t feat = feature_dim();
  for (Task t : {Task::kEre, Task::kDrr}) {
    Rng& r = t == Task::kEre ? ere_rng : drr_rng;
    FineClassifier& fc = fine(t);
    const std::size_t n = specs_.get(t).size();
    if (ablation_.use_semantic) fc.label_embedding = init::normal({n, model_.d_label}, 0.02, r);
    fc.weight = init::xavier(feat, n, r);
    fc.bias = init::zeros({n});
    params_.add(fine_group(t), fc.parameters(t == Task::kEre ? "fine_ere." : "fine_drr."));
  }
}

std::size_t MkpNet::feature_dim() const {
  return model_.d_model + (ablation_.use_semantic ? model_.d_z : 0) +
         (ablation_.use_coarse ? model_.d_coarse : 0);
}

Example MkpNet::prepare(const InstancePair& pair) const {
  Example ex;
  ex.tokens = tokenize_pair(pair.arg1, pair.arg2, vocab_, model_.max_len);
  ex.task = pair.task;
  if (!pair.fine_label.empty()) {
    validate_instance(pair, specs_);
    ex.fine = *specs_.get(pair.task).fine_id(pair.fine_label);
    ex.coarse = static_cast<int>(specs_.get(pair.task).parent(ex.fine));
  } else if (!pair.coarse_label.empty()) {
    const auto c = parse_coarse(pair.coarse_label);
    if (!c) throw DataError("instance '" + pair.id + "': unknown coarse label '" + pair.coarse_label + "'");
    ex.coarse = static_cast<int>(*c);
  }
  return ex;
}

std::vector<Example> MkpNet::prepare(std::span<const InstancePair> pairs) const {
  std::vector<Example> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(prepare(p));
  return out;
}

MkpNet::Encoded MkpNet::encode_batch(std::span<const Example> batch, bool need_labels) const {
  if (batch.empty()) throw ConfigError("empty batch");
  const Task task = batch.front().task;
  std::vector<TokenizedPair> tokens;
  Encoded e;
  tokens.reserve(batch.size());
  for (const auto& ex : batch) {
    if (ex.task != task) throw ConfigError("batch mixes ERE and DRR instances");
    if (need_labels) {
      if (ex.fine < 0 || static_cast<std::size_t>(ex.fine) >= specs_.get(task).size()) {
        throw DataError("training instance without a valid fine label");
      }
      if (ex.coarse != static_cast<int>(specs_.get(task).parent(ex.fine))) {
        throw DataError("training instance coarse label disagrees with its fine label");
      }
    }
    tokens.push_back(ex.tokens);
    e.fine.push_back(ex.fine);
    e.coarse.push_back(ex.coarse);
  }
  e.h_cls = encoder_->encode(tokens);
  return e;
}

ForwardOutput MkpNet::forward_train(std::span<const Example> batch, Rng& rng,
                                    bool teacher_forcing) const {
  Encoded enc = encode_batch(batch, true);
  const Task task = batch.front().task;
  const FineClassifier& fc = fine(task);
  const Real inv_b = Real(1) / static_cast<Real>(batch.size());
  ForwardOutput out;

  Tensor h_z;
  if (ablation_.use_semantic) {
    Tensor h_y = ops::embedding(fc.label_embedding, enc.fine);
    GaussianParams post = semantic_->posterior(enc.h_cls, h_y);
    GaussianParams prior = semantic_->prior(enc.h_cls);
    LatentSample sample = reparameterize(post, rng);
    h_z = sample.h_z;
    out.eps = std::move(sample.eps);
    out.kl = ops::scale(kl_closed_form(post, prior), inv_b);
  } else {
    out.kl = Tensor::scalar(0);
  }

  Tensor h_yc;
  if (ablation_.use_coarse) {
    out.coarse_logits = coarse_->logits(enc.h_cls, h_z);
    out.coarse_ce = ops::cross_entropy(out.coarse_logits, enc.coarse);
    const std::vector<int> fed = teacher_forcing ? enc.coarse : argmax_rows(out.coarse_logits);
    h_yc = coarse_->embed(fed);
  } else {
    out.coarse_ce = Tensor::scalar(0);
  }

  Tensor features = assemble_features(enc.h_cls, h_z, h_yc, ablation_);
  out.fine_logits = ops::add(ops::matmul(features, fc.weight), fc.bias);
  out.fine_ce = ops::cross_entropy(out.fine_logits, enc.fine);
  return out;
}

std::vector<Prediction> MkpNet::predict(std::span<const Example> batch, bool oracle_coarse) const {
  if (oracle_coarse && !ablation_.use_coarse) {
    throw ConfigError("oracle coarse labels require the coarse adaptor");
  }
  NoGradGuard no_grad;
  std::vector<Prediction> out;
  out.reserve(batch.size());
  for (std::size_t start = 0; start < batch.size(); start += kPredictChunk) {
    auto chunk = batch.subspan(start, std::min(kPredictChunk, batch.size() - start));
    Encoded enc = encode_batch(chunk, false);
    const Task task = chunk.front().task;
    const FineClassifier& fc = fine(task);
    const std::size_t n = chunk.size();

    Tensor h_z;
    if (ablation_.use_semantic) h_z = semantic_->infer_latent(enc.h_cls);

    std::vector<Prediction> preds(n);
    Tensor h_yc;
    if (ablation_.use_coarse) {
      Tensor probs = coarse_->classify(enc.h_cls, h_z);
      std::vector<int> chosen = argmax_rows(probs);
      for (std::size_t i = 0; i < n; ++i) {
        if (oracle_coarse) {
          if (enc.coarse[i] < 0) {
            throw DataError("oracle coarse mode needs a gold coarse label for every instance");
          }
          chosen[i] = enc.coarse[i];
        }
        preds[i].coarse = chosen[i];
        auto row = probs.values().subspan(i * kNumCoarse, kNumCoarse);
        preds[i].coarse_probs.assign(row.begin(), row.end());
      }
      h_yc = coarse_->embed(chosen);
    }
    Tensor features = assemble_features(enc.h_cls, h_z, h_yc, ablation_);
    Tensor probs = ops::softmax(ops::add(ops::matmul(features, fc.weight), fc.bias));
    const std::vector<int> fine_ids = argmax_rows(probs);
    const std::size_t classes = probs.dim(1);
    for (std::size_t i = 0; i < n; ++i) {
      preds[i].fine = fine_ids[i];
      auto row = probs.values().subspan(i * classes, classes);
      preds[i].fine_probs.assign(row.begin(), row.end());
      out.push_back(std::move(preds[i]));
    }
  }
  return out;
}

ojson to_json(const ModelConfig& c) {
  return {{"layers", c.layers},     {"heads", c.heads},     {"d_model", c.d_model},
          {"d_z", c.d_z},           {"d_label", c.d_label}, {"d_coarse", c.d_coarse},
          {"max_len", c.max_len},   {"vocab_cap", c.vocab_cap}};
}

ModelConfig model_config_from_json(const nlohmann::json& j) {
  const std::string s = "model config";
  reject_unknown_keys(j, {"layers", "heads", "d_model", "d_z", "d_label", "d_coarse", "max_len",
                          "vocab_cap"},
                      s);
  ModelConfig c;
  read_opt(j, "layers", c.layers, s);
  read_opt(j, "heads", c.heads, s);
  read_opt(j, "d_model", c.d_model, s);
  read_opt(j, "d_z", c.d_z, s);
  read_opt(j, "d_label", c.d_label, s);
  read_opt(j, "d_coarse", c.d_coarse, s);
  read_opt(j, "max_len", c.max_len, s);
  read_opt(j, "vocab_cap", c.vocab_cap, s);
  c.validate();
  return c;
}

ojson to_json(const AblationConfig& c) {
  return {{"use_semantic", c.use_semantic},
          {"use_coarse", c.use_coarse},
          {"use_projection", c.use_projection},
          {"gold_coarse_at_test", c.gold_coarse_at_test}};
}

AblationConfig ablation_from_json(const nlohmann::json& j) {
  const std::string s = "ablation config";
  reject_unknown_keys(j, {"use_semantic", "use_coarse", "use_projection", "gold_coarse_at_test"}, s);
  AblationConfig c;
  read_opt(j, "use_semantic", c.use_semantic, s);
  read_opt(j, "use_coarse", c.use_coarse, s);
  read_opt(j, "use_projection", c.use_projection, s);
  read_opt(j, "gold_coarse_at_test", c.gold_coarse_at_test, s);
  c.validate();
  return c;
}

void MkpNet::save(const std::filesystem::path& dir, const ojson& extra) const {
  std::filesystem::create_directories(dir);
  save_checkpoint(dir, params_.all());
  vocab_.save(dir / "vocab.txt");
  ojson side;
  side["format"] = "mkpnet-model-v1";
  side["model"] = to_json(model_);
  side["ablation"] = to_json(ablation_);
  side["tasks"] = {{"ERE", specs_.ere.to_json()}, {"DRR", specs_.drr.to_json()}};
  side["vocab_size"] = vocab_.size();
  side["vocab_hash"] = vocab_.hash();
  ojson groups = ojson::object();
  for (ParamGroup g : {ParamGroup::kBert, ParamGroup::kSemantic, ParamGroup::kCoarse,
                       ParamGroup::kFineEre, ParamGroup::kFineDrr}) {
    groups[std::string(group_name(g))] = params_.count(g);
  }
  side["param_counts"] = groups;
  for (const auto& [k, v] : extra.items()) side[k] = v;
  std::ofstream out(dir / "model.json", std::ios::trunc);
  if (!out) throw DataError("cannot write " + (dir / "model.json").string());
  out << side.dump(2) << '\n';
}

MkpNet MkpNet::load(const std::filesystem::path& dir) {
  std::ifstream in(dir / "model.json");
  if (!in) throw DataError("cannot read " + (dir / "model.json").string());
  nlohmann::json side;
  try {
    side = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed model.json: ") + e.what());
  }
  Vocab vocab = Vocab::load(dir / "vocab.txt");
  if (vocab.hash() != side.value("vocab_hash", std::string())) {
    throw DataError("vocab.txt does not match the model's vocab hash");
  }
  TaskSpecs specs{TaskSpec::from_json(side.at("tasks").at("ERE")),
                  TaskSpec::from_json(side.at("tasks").at("DRR"))};
  MkpNet net(model_config_from_json(side.at("model")), ablation_from_json(side.at("ablation")),
             std::move(specs), std::move(vocab), 0);
  load_checkpoint(dir, net.params().all());
  return net;
}

MKP_NAMESPACE_END
