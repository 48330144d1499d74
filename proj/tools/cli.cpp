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
#include "cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <optional>

#include "mkp/ablation.hpp"
#include "mkp/enrich.hpp"
#include "mkp/model.hpp"
#include "mkp/run_config.hpp"
#include "mkp/synth.hpp"
#include "mkp/trainer.hpp"

namespace mkp::cli {

namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string model;
  std::string data;
  std::string split = "test";
  std::string task = "ERE";
  bool oracle = false;
  std::string tier = "full";
  std::size_t jobs = 1;
  std::string nodes;
  std::string edges;
  std::string candidates;
  std::string docs;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::trunc | std::ios::binary);
  if (!f) throw DataError("cannot write " + path.string());
  f << content;
}

// Writes the resolved config next to the outputs and echoes it.
void record_config(const fs::path& out_dir, const ojson& resolved, std::ostream& err) {
  fs::create_directories(out_dir);
  write_file(out_dir / "config.json", resolved.dump(2) + "\n");
  err << "resolved config:\n" << resolved.dump(2) << '\n';
}

RunConfig resolve_run_config(const Options& o) {
  RunConfig c = o.config.empty() ? RunConfig{} : load_run_config(o.config);
  if (!o.data.empty()) c.data.manifest = o.data;
  if (o.seed) c.trainer.seed = *o.seed;
  c.validate();
  return c;
}

Task parse_task_flag(const std::string& s) {
  const auto t = parse_task(s);
  if (!t) throw UsageError("--task must be ERE or DRR");
  return *t;
}

int cmd_gen_data(const Options& o, std::ostream& out, std::ostream& err) {
  RunConfig c = o.config.empty() ? RunConfig{} : load_run_config(o.config);
  if (!c.data.manifest.empty()) throw UsageError("gen-data needs a synth data section, not a manifest");
  if (o.seed) c.data.synth.seed = *o.seed;
  c.data.synth.validate(default_task_specs());
  const fs::path dir = o.out;
  ojson resolved = {{"command", "gen-data"}, {"synth", to_json(c.data.synth)}};
  record_config(dir, resolved, err);
  const auto manifest = write_corpus(dir, synth_generate(c.data.synth), c.data.synth);
  out << manifest.string() << '\n';
  return kExitOk;
}

int cmd_train(const Options& o, std::ostream& out, std::ostream& err) {
  const RunConfig c = resolve_run_config(o);
  const fs::path dir = o.out;
  ojson resolved = c.to_json();
  resolved["command"] = "train";
  record_config(dir, resolved, err);

  const GridData data = load_grid_data(c.data);
  MkpNet net(c.model, c.ablation, data.specs, build_vocab(data, c.model.vocab_cap),
             model_init_seed(c.trainer.seed));
  const Task target = c.trainer.target_task;
  const auto ere = net.prepare(data.ere_train);
  const auto drr = net.prepare(data.drr_train);
  const auto dev = net.prepare(target == Task::kEre ? data.ere_dev : data.drr_dev);
  const auto test = net.prepare(target == Task::kEre ? data.ere_test : data.drr_test);

  Trainer trainer(net, c.trainer);
  std::ofstream log(dir / "train_log.jsonl", std::ios::trunc | std::ios::binary);
  const TrainResult result = trainer.train(ere, drr, dev, &log);
  net.save(dir, {{"trainer", to_json(c.trainer)},
                 {"best_epoch", result.best_epoch},
                 {"best_dev_acc", result.best_dev_acc}});

  EvalReport report;
  report.n_test = test.size();
  report.rows.push_back(evaluate_model(net, test, c.ablation.gold_coarse_at_test, "model").row);
  report.validate();
  write_file(dir / "metrics.json", report.to_json().dump(2) + "\n");
  err << "best epoch " << result.best_epoch << ", dev acc " << result.best_dev_acc
      << ", test acc " << report.rows.front().acc << '\n';
  out << dir.string() << '\n';
  return kExitOk;
}

int cmd_eval(const Options& o, std::ostream& out, std::ostream& err) {
  const MkpNet net = MkpNet::load(o.model);
  const Task task = parse_task_flag(o.task);
  DataConfig dc;
  if (!o.data.empty()) {
    dc.manifest = o.data;
  } else if (!o.config.empty()) {
    dc = load_run_config(o.config).data;
  } else {
    throw UsageError("eval needs --data or --config");
  }
  if (o.split != "train" && o.split != "dev" && o.split != "test") {
    throw UsageError("--split must be train, dev or test");
  }
  const fs::path dir = o.out;
  ojson resolved = {{"command", "eval"},  {"model", o.model},
                    {"data", dc.manifest.empty() ? to_json(dc.synth) : ojson(dc.manifest.string())},
                    {"task", o.task},     {"split", o.split},
                    {"oracle_coarse", o.oracle}};
  record_config(dir, resolved, err);

  const GridData data = load_grid_data(dc);
  const auto& ere = o.split == "train" ? data.ere_train : o.split == "dev" ? data.ere_dev : data.ere_test;
  const auto& drr = o.split == "train" ? data.drr_train : o.split == "dev" ? data.drr_dev : data.drr_test;
  const auto examples = net.prepare(task == Task::kEre ? ere : drr);
  EvalReport report;
  report.n_test = examples.size();
  report.rows.push_back(evaluate_model(net, examples, o.oracle, o.oracle ? "model (gold coarse)" : "model").row);
  report.validate();
  write_file(dir / "metrics.json", report.to_json().dump(2) + "\n");
  write_file(dir / "metrics.tsv", report.to_tsv());
  err << report.to_tsv();
  out << (dir / "metrics.json").string() << '\n';
  return kExitOk;
}

int cmd_ablate(const Options& o, std::ostream& out, std::ostream& err) {
  const RunConfig c = resolve_run_config(o);
  const fs::path dir = o.out;
  ojson resolved = c.to_json();
  resolved["command"] = "ablate";
  record_config(dir, resolved, err);

  GridOptions g;
  g.model = c.model;
  g.trainer = c.trainer;
  g.jobs = o.jobs;
  g.significance_iterations = c.significance_iterations;
  g.out_dir = dir / "runs";
  g.progress = [&err](const std::string& msg) { err << msg << '\n'; };
  const EvalReport report = ablation_grid(load_grid_data(c.data), g);
  write_file(dir / "report.tsv", report.to_tsv());
  write_file(dir / "report.json", report.to_json().dump(2) + "\n");
  err << report.to_tsv();
  out << (dir / "report.tsv").string() << '\n';
  return kExitOk;
}

int cmd_predict(const Options& o, std::ostream& out, std::ostream& err) {
  const MkpNet net = MkpNet::load(o.model);
  const fs::path dir = o.out;
  record_config(dir,
                {{"command", "predict"}, {"model", o.model}, {"data", o.data},
                 {"oracle_coarse", o.oracle}},
                err);
  std::ifstream in(o.data);
  if (!in) throw DataError("cannot read " + o.data);
  std::vector<InstancePair> pairs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = o.data + ":" + std::to_string(lineno);
    try {
      const auto j = nlohmann::json::parse(line);
      InstancePair p;
      p.id = j.value("id", std::to_string(lineno));
      const auto task = parse_task(j.value("task", std::string("ERE")));
      if (!task) throw DataError("task must be ERE or DRR");
      p.task = *task;
      p.arg1 = j.at("arg1").get<std::string>();
      p.arg2 = j.at("arg2").get<std::string>();
      p.fine_label = j.value("fine_label", std::string());
      p.coarse_label = j.value("coarse_label", std::string());
      pairs.push_back(std::move(p));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(where + ": " + e.what());
    } catch (const DataError& e) {
      throw DataError(where + ": " + e.what());
    }
  }
  std::ofstream pred_out(dir / "predictions.jsonl", std::ios::trunc | std::ios::binary);
  for (const auto& p : pairs) {
    const Example ex = net.prepare(p);
    const auto pred = net.predict(std::span<const Example>(&ex, 1), o.oracle).front();
    ojson r = {{"id", p.id},
               {"task", std::string(task_name(p.task))},
               {"fine_label", net.specs().get(p.task).fine_labels.at(static_cast<std::size_t>(pred.fine))},
               {"probability", pred.fine_probs.at(static_cast<std::size_t>(pred.fine))}};
    if (pred.coarse >= 0) r["coarse_label"] = std::string(kCoarseNames.at(static_cast<std::size_t>(pred.coarse)));
    pred_out << r.dump() << '\n';
  }
  out << (dir / "predictions.jsonl").string() << '\n';
  return kExitOk;
}

int cmd_enrich(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.candidates.empty() == o.docs.empty()) {
    throw UsageError("enrich needs exactly one of --candidates or --docs");
  }
  const auto tier = parse_tier(o.tier);
  if (!tier) throw UsageError("--tier must be core, high or full");
  const TierThresholds thresholds =
      o.config.empty() ? TierThresholds{} : load_run_config(o.config).enrichment;
  const fs::path dir = o.out;
  record_config(dir,
                {{"command", "enrich"},
                 {"model", o.model},
                 {"nodes", o.nodes},
                 {"edges", o.edges},
                 {"candidates", o.candidates},
                 {"docs", o.docs},
                 {"tier", o.tier},
                 {"thresholds", {{"core", thresholds.core}, {"high", thresholds.high}, {"full", thresholds.full}}}},
                err);

  EventGraph graph = load_nodes_tsv(o.nodes);
  if (!o.edges.empty()) load_edges_tsv(o.edges, graph);
  std::vector<Candidate> cands;
  if (!o.candidates.empty()) {
    cands = load_candidates_tsv(o.candidates);
  } else {
    std::ifstream docs(o.docs);
    if (!docs) throw DataError("cannot read " + o.docs);
    cands = cooccurrence_candidates(docs);
  }
  const MkpNet net = MkpNet::load(o.model);
  const EnrichResult r = enrich_graph(graph, cands, model_classifier(net), thresholds);
  save_nodes_tsv(dir / "nodes.tsv", r.graph);
  save_edges_tsv(dir / "edges.tsv", r.graph.view(*tier));
  save_conflicts_tsv(dir / "conflicts.tsv", r.conflicts);
  err << "classified " << r.classified << ", rejected " << r.rejected << ", conflicts "
      << r.conflicts.size() << ", " << tier_name(*tier) << " edges " << r.graph.view(*tier).size()
      << '\n';
  out << (dir / "edges.tsv").string() << '\n';
  return kExitOk;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"MKPNet: multi-knowledge projection for event relation extraction", "mkpnet"};
  app.require_subcommand(1);
  Options o;

  auto* gen = app.add_subcommand("gen-data", "write a synthetic ERE + DRR corpus");
  gen->add_option("--config", o.config, "run config (data.synth section)");
  gen->add_option("--seed", o.seed, "override the generator seed");
  gen->add_option("--out", o.out, "output directory")->required();

  auto* train = app.add_subcommand("train", "train one model");
  train->add_option("--config", o.config, "run config")->required();
  train->add_option("--out", o.out, "output directory")->required();
  train->add_option("--data", o.data, "dataset manifest (overrides the config)");
  train->add_option("--seed", o.seed, "override the trainer seed");

  auto* eval = app.add_subcommand("eval", "score a trained model");
  eval->add_option("--model", o.model, "model directory")->required();
  eval->add_option("--data", o.data, "dataset manifest");
  eval->add_option("--config", o.config, "run config supplying the data section");
  eval->add_option("--split", o.split, "train, dev or test");
  eval->add_option("--task", o.task, "ERE or DRR");
  eval->add_flag("--oracle-coarse", o.oracle, "feed gold coarse labels");
  eval->add_option("--out", o.out, "output directory")->required();

  auto* ablate = app.add_subcommand("ablate", "train and score the ablation grid");
  ablate->add_option("--config", o.config, "run config")->required();
  ablate->add_option("--out", o.out, "output directory")->required();
  ablate->add_option("--data", o.data, "dataset manifest (overrides the config)");
  ablate->add_option("--seed", o.seed, "override the trainer seed");
  ablate->add_option("--jobs", o.jobs, "configurations trained in parallel")
      ->check(CLI::PositiveNumber);

  auto* predict = app.add_subcommand("predict", "label instance pairs from a JSONL file");
  predict->add_option("--model", o.model, "model directory")->required();
  predict->add_option("--data", o.data, "JSONL with id, task, arg1, arg2")->required();
  predict->add_flag("--oracle-coarse", o.oracle, "feed gold coarse labels (coarse_label field)");
  predict->add_option("--out", o.out, "output directory")->required();

  auto* enrich = app.add_subcommand("enrich", "add implicit edges to an event graph");
  enrich->add_option("--model", o.model, "model directory")->required();
  enrich->add_option("--nodes", o.nodes, "nodes TSV (id, text)")->required();
  enrich->add_option("--edges", o.edges, "explicit edges TSV");
  enrich->add_option("--candidates", o.candidates, "candidate pairs TSV (event1, event2, frequency)");
  enrich->add_option("--docs", o.docs, "documents TSV (doc id, space-separated event ids)");
  enrich->add_option("--tier", o.tier, "core, high or full");
  enrich->add_option("--config", o.config, "run config supplying enrichment thresholds");
  enrich->add_option("--out", o.out, "output directory")->required();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed()) return cmd_gen_data(o, out, err);
    if (train->parsed()) return cmd_train(o, out, err);
    if (eval->parsed()) return cmd_eval(o, out, err);
    if (ablate->parsed()) return cmd_ablate(o, out, err);
    if (predict->parsed()) return cmd_predict(o, out, err);
    if (enrich->parsed()) return cmd_enrich(o, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace mkp::cli
