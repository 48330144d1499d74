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
#include "mkp/task.hpp"

#include <set>

MKP_NAMESPACE_BEGIN

std::string_view task_name(Task task) { return task == Task::kEre ? "ERE" : "DRR"; }

std::optional<Task> parse_task(std::string_view name) {
  if (name == "ERE") return Task::kEre;
  if (name == "DRR") return Task::kDrr;
  return std::nullopt;
}

void TaskSpec::validate() const {
  const std::string who(task_name(task));
  if (fine_labels.empty()) throw DataError(who + " task spec has no fine labels");
  if (parents.size() != fine_labels.size()) {
    throw DataError(who + " task spec: every fine label needs exactly one coarse parent");
  }
  std::set<std::string> seen;
  for (const auto& l : fine_labels) {
    if (!seen.insert(l).second) throw DataError(who + " task spec repeats fine label '" + l + "'");
  }
}

std::optional<int> TaskSpec::fine_id(std::string_view label) const {
  for (std::size_t i = 0; i < fine_labels.size(); ++i) {
    if (fine_labels[i] == label) return static_cast<int>(i);
  }
  return std::nullopt;
}

nlohmann::ordered_json TaskSpec::to_json() const {
  nlohmann::ordered_json labels = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < fine_labels.size(); ++i) {
    labels.push_back({{"name", fine_labels[i]}, {"coarse", coarse_name(parents[i])}});
  }
  return {{"task", task_name(task)}, {"labels", labels}};
}

TaskSpec TaskSpec::from_json(const nlohmann::json& j) {
  TaskSpec spec;
  try {
    const auto task = parse_task(j.at("task").get<std::string>());
    if (!task) throw DataError("unknown task '" + j.at("task").get<std::string>() + "'");
    spec.task = *task;
    for (const auto& l : j.at("labels")) {
      const auto name = l.at("name").get<std::string>();
      const auto coarse = parse_coarse(l.at("coarse").get<std::string>());
      if (!coarse) {
        throw DataError("label '" + name + "' has unknown coarse parent '" +
                        l.at("coarse").get<std::string>() + "'");
      }
      spec.fine_labels.push_back(name);
      spec.parents.push_back(*coarse);
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed task spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

namespace {

TaskSpec make_spec(Task task,
                   std::initializer_list<std::pair<const char*, CoarseLabel>> labels) {
  TaskSpec spec;
  spec.task = task;
  for (const auto& [name, parent] : labels) {
    spec.fine_labels.emplace_back(name);
    spec.parents.push_back(parent);
  }
  spec.validate();
  return spec;
}

}  // namespace

TaskSpec default_ere_spec() {
  using C = CoarseLabel;
  return make_spec(Task::kEre, {{"Precedence", C::kTemporal},
                                {"Succession", C::kTemporal},
                                {"Synchronous", C::kTemporal},
                                {"Reason", C::kContingency},
                                {"Result", C::kContingency},
                                {"Condition", C::kContingency},
                                {"Contrast", C::kComparison},
                                {"Concession", C::kComparison},
                                {"Conjunction", C::kExpansion},
                                {"Instantiation", C::kExpansion},
                                {"Restatement", C::kExpansion},
                                {"Alternative", C::kExpansion},
                                {"ChosenAlternative", C::kExpansion},
                                {"Exception", C::kExpansion}});
}

TaskSpec default_drr_spec() {
  using C = CoarseLabel;
  return make_spec(Task::kDrr, {{"Asynchronous", C::kTemporal},
                                {"Synchrony", C::kTemporal},
                                {"Cause", C::kContingency},
                                {"Pragmatic cause", C::kContingency},
                                {"Contrast", C::kComparison},
                                {"Concession", C::kComparison},
                                {"Conjunction", C::kExpansion},
                                {"Instantiation", C::kExpansion},
                                {"Restatement", C::kExpansion},
                                {"Alternative", C::kExpansion},
                                {"List", C::kExpansion}});
}

TaskSpecs default_task_specs() { return {default_ere_spec(), default_drr_spec()}; }

MKP_NAMESPACE_END
