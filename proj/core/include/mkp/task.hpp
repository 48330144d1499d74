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
#ifndef MKP_TASK_HPP_
#define MKP_TASK_HPP_

#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mkp/coarse.hpp"

MKP_NAMESPACE_BEGIN

enum class Task { kEre, kDrr };

std::string_view task_name(Task task);
std::optional<Task> parse_task(std::string_view name);

// Fine label inventory of one task and its fine -> coarse map.
struct TaskSpec {
  Task task = Task::kEre;
  std::vector<std::string> fine_labels;
  std::vector<CoarseLabel> parents;  // parallel to fine_labels

  // Non-empty, duplicate-free, one parent per label.
  void validate() const;
  std::size_t size() const { return fine_labels.size(); }
  std::optional<int> fine_id(std::string_view label) const;
  CoarseLabel parent(int fine_id) const { return parents.at(static_cast<std::size_t>(fine_id)); }

  // {"task": "ERE", "labels": [{"name": ..., "coarse": ...}, ...]}
  nlohmann::ordered_json to_json() const;
  static TaskSpec from_json(const nlohmann::json& j);
};

struct TaskSpecs {
  TaskSpec ere;
  TaskSpec drr;

  const TaskSpec& get(Task t) const { return t == Task::kEre ? ere : drr; }
};

// Event relations of the ASER inventory (14) and PDTB level-2 discourse
// relations (11) used by the synthetic generator.
TaskSpec default_ere_spec();
TaskSpec default_drr_spec();
TaskSpecs default_task_specs();

MKP_NAMESPACE_END

#endif  // MKP_TASK_HPP_
