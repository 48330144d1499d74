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
#include "mkp/ablation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include "mkp/metrics.hpp"

MKP_NAMESPACE_BEGIN

namespace {

using ojson = nlohmann::ordered_json;

std::string cell(const std::optional<double>& v) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", *v);
  return buf;
}

ojson opt_json(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }

struct Trained {
  std::unique_ptr<MkpNet> net;
  ModelEval eval;
};

}  // namespace

const EvalRow& EvalReport::row(const std::string& config) const {
  for (const auto& r : rows) {
    if (r.config == config) return r;
  }
  throw ConfigError("report has no row '" + config + "'");
}

bool EvalReport::has_row(const std::string& config) const {
  for (const auto& r : rows) {
    if (r.config == config) return true;
  }
  return false;
}

void EvalReport::compute_deltas() {
  const EvalRow base = row(baseline);
  for (auto& r : rows) {
    if (r.config == baseline) continue;
    r.delta_acc = r.acc - base.acc;
    r.delta_f1 = r.f1 - base.f1;
  }
}

void EvalReport::validate() const {
  if (!baseline.empty() && !has_row(baseline)) {
    throw ConfigError("report baseline '" + baseline + "' is not a row");
  }
  auto unit = [](double v) { return std::isfinite(v) && v >= 0 && v <= 1; };
  for (const auto& r : rows) {
    bool ok = unit(r.acc) && unit(r.f1) && unit(r.micro_f1);
    ok = ok && (!r.coarse_acc || unit(*r.coarse_acc)) && (!r.coarse_f1 || unit(*r.coarse_f1));
    if (!ok) throw NumericError("report row '" + r.config + "' has a metric outside [0, 1]");
  }
}

std::string EvalReport::to_tsv() const {
  std::ostringstream out;
  out << "config\tacc\tf1\tcoarse_acc\tcoarse_f1\tdelta_acc\tdelta_f1\n";
  for (const auto& r : rows) {
    out << r.config << '\t' << cell(r.acc) << '\t' << cell(r.f1) << '\t' << cell(r.coarse_acc)
        << '\t' << cell(r.coarse_f1) << '\t' << cell(r.delta_acc) << '\t' << cell(r.delta_f1)
        << '\n';
  }
  return out.str();
}

ojson EvalReport::to_json() const {
  ojson rows_json = ojson::array();
  for (const auto& r : rows) {
    rows_json.push_back({{"config", r.config},
                         {"acc", r.acc},
                         {"f1", r.f1},
                         {"coarse_acc", opt_json(r.coarse_acc)},
                         {"coarse_f1", opt_json(r.coarse_f1)},
                         {"delta_acc", opt_json(r.delta_acc)},
                         {"delta_f1", opt_json(r.delta_f1)},
                         {"micro_f1", r.micro_f1},
                         {"p_value", opt_json(r.p_value)}});
  }
  return {{"baseline", baseline}, {"n_test", n_test}, {"rows", rows_json}};
}

ModelEval evaluate_model(const MkpNet& net, std::span<const Example> data, bool oracle_coarse,
                         const std::string& name) {
  if (data.empty()) throw DataError("evaluation set is empty");
  const auto preds = net.predict(data, oracle_coarse);
  ModelEval out;
  std::vector<int> gold_c, pred_c;
  for (std::size_t i = 0; i < data.size(); ++i) {
    out.gold.push_back(data[i].fine);
    out.pred.push_back(preds[i].fine);
    gold_c.push_back(data[i].coarse);
    pred_c.push_back(preds[i].coarse);
  }
  const auto labels = label_range(net.specs().get(data.front().task).size());
  out.row.config = name;
  out.row.acc = accuracy(out.gold, out.pred);
  out.row.f1 = macro_f1(out.gold, out.pred, labels);
  out.row.micro_f1 = micro_f1(out.gold, out.pred, labels);
  if (net.ablation().use_coarse) {
    const auto coarse_labels = label_range(kNumCoarse);
    out.row.coarse_acc = accuracy(gold_c, pred_c);
    out.row.coarse_f1 = macro_f1(gold_c, pred_c, coarse_labels);
  }
  return out;
}

std::vector<GridVariant> grid_variants() {
  auto abl = [](bool sa, bool ca, bool kp, bool oracle = false) {
    return AblationConfig{sa, ca, kp, oracle};
  };
  return {
      {kRowBertCls, "bert_cls", abl(false, false, false), ""},
      {kRowNoKp, "no_kp", abl(true, true, false), ""},
      {kRowNoSaCa, "no_sa_ca", abl(false, false, true), ""},
      {kRowNoCa, "no_ca", abl(true, false, true), ""},
      {kRowNoSa, "no_sa", abl(false, true, true), ""},
      {kRowFull, "full", abl(true, true, true), ""},
      {kRowOracle, "no_sa_oracle", abl(false, true, true, true), kRowNoSa},
  };
}

Vocab build_vocab(const GridData& data, std::size_t cap) {
  std::vector<std::string> texts;
  for (const auto* split : {&data.ere_train, &data.drr_train}) {
    for (const auto& p : *split) {
      texts.push_back(p.arg1);
      texts.push_back(p.arg2);
    }
  }
  return Vocab::build(texts, cap);
}

std::uint64_t model_init_seed(std::uint64_t run_seed) { return run_seed ^ 0x6d6b706e6574ULL; }

EvalReport ablation_grid(const GridData& data, const GridOptions& options) {
  options.model.validate();
  options.trainer.validate();
  const Task target = options.trainer.target_task;

  auto variants = grid_variants();
  if (!options.only.empty()) {
    std::vector<GridVariant> kept;
    for (const auto& v : variants) {
      if (std::find(options.only.begin(), options.only.end(), v.name) != options.only.end()) {
        kept.push_back(v);
      }
    }
    if (kept.size() != options.only.size()) throw ConfigError("unknown row requested from the grid");
    for (const auto& v : kept) {
      if (!v.reuse.empty() &&
          std::find_if(kept.begin(), kept.end(), [&](const GridVariant& k) {
            return k.name == v.reuse;
          }) == kept.end()) {
        throw ConfigError("row '" + v.name + "' needs row '" + v.reuse + "'");
      }
    }
    variants = std::move(kept);
  }

  const Vocab vocab = build_vocab(data, options.model.vocab_cap);
  // Every variant sees identical prepared data; tokenization only depends
  // on the shared vocab and max_len.
  const MkpNet tokenizer(options.model, AblationConfig{false, false, false, false}, data.specs,
                         vocab, 0);
  const auto ere_train = tokenizer.prepare(data.ere_train);
  const auto drr_train = tokenizer.prepare(data.drr_train);
  const auto dev = tokenizer.prepare(target == Task::kEre ? data.ere_dev : data.drr_dev);
  const auto test = tokenizer.prepare(target == Task::kEre ? data.ere_test : data.drr_test);

  std::vector<std::size_t> to_train;
  for (std::size_t i = 0; i < variants.size(); ++i) {
    if (variants[i].reuse.empty()) to_train.push_back(i);
  }
  std::vector<Trained> trained(variants.size());
  std::vector<std::exception_ptr> errors(variants.size());
  std::mutex progress_mu;
  auto say = [&](const std::string& msg) {
    if (!options.progress) return;
    std::lock_guard lock(progress_mu);
    options.progress(msg);
  };

  auto run_one = [&](std::size_t vi) {
    try {
      const GridVariant& v = variants[vi];
      say("training " + v.name);
      auto net = std::make_unique<MkpNet>(options.model, v.ablation, data.specs, vocab,
                                          model_init_seed(options.trainer.seed));
      Trainer trainer(*net, options.trainer);
      std::ofstream log;
      if (!options.out_dir.empty()) {
        std::filesystem::create_directories(options.out_dir / v.slug);
        log.open(options.out_dir / v.slug / "train_log.jsonl", std::ios::trunc);
      }
      const auto result =
          trainer.train(ere_train, drr_train, dev, log.is_open() ? &log : nullptr);
      if (!options.out_dir.empty()) {
        net->save(options.out_dir / v.slug / "model",
                  {{"trainer", to_json(options.trainer)}, {"best_epoch", result.best_epoch}});
      }
      trained[vi].eval = evaluate_model(*net, test, false, v.name);
      trained[vi].net = std::move(net);
      say("finished " + v.name);
    } catch (...) {
      errors[vi] = std::current_exception();
    }
  };

  const std::size_t jobs = std::max<std::size_t>(1, std::min(options.jobs, to_train.size()));
  if (jobs == 1) {
    for (std::size_t vi : to_train) run_one(vi);
  } else {
    std::size_t next = 0;
    std::mutex next_mu;
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < jobs; ++j) {
      pool.emplace_back([&] {
        for (;;) {
          std::size_t k;
          {
            std::lock_guard lock(next_mu);
            if (next == to_train.size()) return;
            k = next++;
          }
          run_one(to_train[k]);
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  for (std::size_t vi = 0; vi < variants.size(); ++vi) {
    const GridVariant& v = variants[vi];
    if (v.reuse.empty()) continue;
    for (std::size_t src = 0; src < variants.size(); ++src) {
      if (variants[src].name == v.reuse) {
        trained[vi].eval = evaluate_model(*trained[src].net, test, true, v.name);
      }
    }
  }

  EvalReport report;
  report.n_test = test.size();
  const bool has_baseline = std::any_of(variants.begin(), variants.end(),
                                        [](const GridVariant& v) { return v.name == kRowNoKp; });
  const ModelEval* base = nullptr;
  for (std::size_t vi = 0; vi < variants.size(); ++vi) {
    if (variants[vi].name == kRowNoKp) base = &trained[vi].eval;
  }
  for (std::size_t vi = 0; vi < variants.size(); ++vi) {
    EvalRow r = trained[vi].eval.row;
    if (base && variants[vi].name != kRowNoKp) {
      r.p_value = significance(base->gold, base->pred, trained[vi].eval.pred,
                               options.significance_iterations, options.trainer.seed);
    }
    report.rows.push_back(std::move(r));
  }
  if (has_baseline) {
    report.baseline = kRowNoKp;
    report.compute_deltas();
  }
  report.validate();
  return report;
}

MKP_NAMESPACE_END
