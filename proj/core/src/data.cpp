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
#include "mkp/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

#include "mkp/rng.hpp"

MKP_NAMESPACE_BEGIN

namespace {

using ojson = nlohmann::ordered_json;

const std::set<std::string> kKnownFields = {"id",         "task",         "arg1",
                                            "arg2",       "fine_label",   "coarse_label",
                                            "connective", "confidence"};

}  // namespace

void validate_instance(const InstancePair& pair, const TaskSpecs& specs) {
  const TaskSpec& spec = specs.get(pair.task);
  const auto fine = spec.fine_id(pair.fine_label);
  if (!fine) {
    throw DataError("instance '" + pair.id + "': fine label '" + pair.fine_label +
                    "' is not a " + std::string(task_name(pair.task)) + " label");
  }
  const auto expected = coarse_name(spec.parent(*fine));
  if (pair.coarse_label != expected) {
    throw DataError("instance '" + pair.id + "': coarse label '" + pair.coarse_label +
                    "' does not match parent '" + std::string(expected) + "' of '" +
                    pair.fine_label + "'");
  }
  if (pair.confidence && !(*pair.confidence >= 0.0)) {
    throw DataError("instance '" + pair.id + "': confidence must be non-negative");
  }
}

ojson to_json(const InstancePair& pair) {
  ojson j;
  j["id"] = pair.id;
  j["task"] = task_name(pair.task);
  j["arg1"] = pair.arg1;
  j["arg2"] = pair.arg2;
  j["fine_label"] = pair.fine_label;
  j["coarse_label"] = pair.coarse_label;
  if (pair.connective) j["connective"] = *pair.connective;
  if (pair.confidence) j["confidence"] = *pair.confidence;
  for (const auto& [k, v] : pair.extra.items()) j[k] = v;
  return j;
}

InstancePair instance_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw DataError("instance must be a JSON object");
  InstancePair p;
  try {
    p.id = j.at("id").get<std::string>();
    const auto task_str = j.at("task").get<std::string>();
    const auto task = parse_task(task_str);
    if (!task) throw DataError("unknown task '" + task_str + "'");
    p.task = *task;
    p.arg1 = j.at("arg1").get<std::string>();
    p.arg2 = j.at("arg2").get<std::string>();
    p.fine_label = j.at("fine_label").get<std::string>();
    p.coarse_label = j.at("coarse_label").get<std::string>();
    if (j.contains("connective") && !j["connective"].is_null()) {
      p.connective = j["connective"].get<std::string>();
    }
    if (j.contains("confidence") && !j["confidence"].is_null()) {
      p.confidence = j["confidence"].get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(e.what());
  }
  // nlohmann::json iterates keys sorted; extras keep that order.
  for (const auto& [k, v] : j.items()) {
    if (!kKnownFields.contains(k)) p.extra[k] = v;
  }
  return p;
}

std::vector<InstancePair> read_jsonl(std::istream& in, const TaskSpecs& specs,
                                     const std::string& source) {
  std::vector<InstancePair> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      InstancePair p = instance_from_json(nlohmann::json::parse(line));
      validate_instance(p, specs);
      out.push_back(std::move(p));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(source + ":" + std::to_string(lineno) + ": malformed JSON: " + e.what());
    } catch (const DataError& e) {
      throw DataError(source + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::vector<InstancePair> load_jsonl(const std::filesystem::path& path,
                                     const TaskSpecs& specs) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path.string());
  return read_jsonl(in, specs, path.string());
}

void save_jsonl(const std::filesystem::path& path, std::span<const InstancePair> pairs) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& p : pairs) out << to_json(p).dump() << '\n';
}

std::vector<InstancePair> strip_connectives(std::span<const InstancePair> explicit_pairs) {
  std::vector<InstancePair> out;
  out.reserve(explicit_pairs.size());
  for (const auto& p : explicit_pairs) {
    // Stripped pairs carry an empty connective, so a second pass is a no-op.
    if (!p.connective) {
      throw DataError("strip_connectives: instance '" + p.id + "' has no connective");
    }
    InstancePair copy = p;
    copy.connective = std::string();
    out.push_back(std::move(copy));
  }
  return out;
}

std::vector<InstancePair> cap_per_category(std::span<const InstancePair> pairs,
                                           std::size_t cap) {
  std::map<std::string, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (!pairs[i].confidence) {
      throw DataError("cap_per_category: instance '" + pairs[i].id + "' has no confidence");
    }
    by_label[pairs[i].fine_label].push_back(i);
  }
  std::vector<bool> keep(pairs.size(), false);
  for (auto& [label, idx] : by_label) {
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      if (*pairs[a].confidence != *pairs[b].confidence) {
        return *pairs[a].confidence > *pairs[b].confidence;
      }
      return pairs[a].id < pairs[b].id;
    });
    for (std::size_t k = 0; k < std::min(cap, idx.size()); ++k) keep[idx[k]] = true;
  }
  std::vector<InstancePair> out;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (keep[i]) out.push_back(pairs[i]);
  }
  return out;
}

Splits stratified_split(std::span<const InstancePair> pairs, std::size_t n_dev,
                        std::size_t n_test, std::uint64_t seed) {
  if (n_dev + n_test > pairs.size()) {
    throw DataError("stratified_split: dev+test exceed " + std::to_string(pairs.size()) +
                    " instances");
  }
  std::map<std::string, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < pairs.size(); ++i) by_label[pairs[i].fine_label].push_back(i);

  // Largest-remainder apportionment of a total across labels by share.
  auto apportion = [&](std::size_t total, const std::vector<std::size_t>& avail) {
    std::vector<std::size_t> take(avail.size());
    std::vector<std::pair<double, std::size_t>> rem;
    std::size_t given = 0;
    for (std::size_t l = 0; l < avail.size(); ++l) {
      const double exact = static_cast<double>(total) * static_cast<double>(avail[l]) /
                           static_cast<double>(pairs.size());
      take[l] = std::min(avail[l], static_cast<std::size_t>(std::floor(exact)));
      given += take[l];
      rem.emplace_back(exact - std::floor(exact), l);
    }
    std::stable_sort(rem.begin(), rem.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t r = 0; given < total && r < rem.size() * 2; ++r) {
      const std::size_t l = rem[r % rem.size()].second;
      if (take[l] < avail[l]) {
        ++take[l];
        ++given;
      }
    }
    return take;
  };

  Rng rng(seed);
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::size_t> sizes;
  for (auto& [label, idx] : by_label) {
    rng.shuffle(std::span<std::size_t>(idx));
    groups.push_back(idx);
    sizes.push_back(idx.size());
  }
  const auto dev_take = apportion(n_dev, sizes);
  std::vector<std::size_t> left(sizes.size());
  for (std::size_t l = 0; l < sizes.size(); ++l) left[l] = sizes[l] - dev_take[l];
  const auto test_take = apportion(n_test, left);

  std::vector<int> where(pairs.size(), 0);  // 0 train, 1 dev, 2 test
  for (std::size_t l = 0; l < groups.size(); ++l) {
    for (std::size_t k = 0; k < dev_take[l]; ++k) where[groups[l][k]] = 1;
    for (std::size_t k = 0; k < test_take[l]; ++k) where[groups[l][dev_take[l] + k]] = 2;
  }
  Splits s;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    (where[i] == 0 ? s.train : where[i] == 1 ? s.dev : s.test).push_back(pairs[i]);
  }
  return s;
}

ojson DatasetManifest::to_json() const {
  ojson j;
  j["tasks"] = {{"ERE", specs.ere.to_json()}, {"DRR", specs.drr.to_json()}};
  ojson sp = ojson::object();
  for (const auto& [name, e] : splits) sp[name] = {{"path", e.path}, {"count", e.count}};
  j["splits"] = sp;
  j["provenance"] = provenance;
  return j;
}

void save_manifest(const std::filesystem::path& path, const DatasetManifest& manifest) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << manifest.to_json().dump(2) << '\n';
}

namespace {

std::size_t count_lines(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw DataError("manifest split file missing: " + p.string());
  std::size_t n = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) ++n;
  }
  return n;
}

}  // namespace

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read manifest " + path.string());
  DatasetManifest m;
  try {
    const auto j = nlohmann::json::parse(in);
    m.specs.ere = TaskSpec::from_json(j.at("tasks").at("ERE"));
    m.specs.drr = TaskSpec::from_json(j.at("tasks").at("DRR"));
    if (m.specs.ere.task != Task::kEre || m.specs.drr.task != Task::kDrr) {
      throw DataError("manifest task specs are swapped");
    }
    for (const auto& [name, e] : j.at("splits").items()) {
      m.splits[name] = {e.at("path").get<std::string>(), e.at("count").get<std::size_t>()};
    }
    if (j.contains("provenance")) m.provenance = j["provenance"];
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed manifest " + path.string() + ": " + e.what());
  }
  const auto base = path.parent_path();
  for (const auto& [name, e] : m.splits) {
    const std::size_t n = count_lines(base / e.path);
    if (n != e.count) {
      throw DataError("manifest split '" + name + "' records " + std::to_string(e.count) +
                      " instances, file holds " + std::to_string(n));
    }
  }
  return m;
}

std::vector<InstancePair> load_split(const std::filesystem::path& manifest_path,
                                     const DatasetManifest& manifest,
                                     const std::string& split) {
  auto it = manifest.splits.find(split);
  if (it == manifest.splits.end()) return {};
  return load_jsonl(manifest_path.parent_path() / it->second.path, manifest.specs);
}

MKP_NAMESPACE_END
