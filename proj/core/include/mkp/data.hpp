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
#ifndef MKP_DATA_HPP_
#define MKP_DATA_HPP_

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mkp/task.hpp"

MKP_NAMESPACE_BEGIN

// One classification instance. Field names on disk are exactly: id, task,
// arg1, arg2, fine_label, coarse_label, connective, confidence. Any other
// field is kept in `extra` and written back unchanged.
struct InstancePair {
  std::string id;
  Task task = Task::kEre;
  std::string arg1;
  std::string arg2;
  std::string fine_label;
  std::string coarse_label;
  std::optional<std::string> connective;
  std::optional<double> confidence;
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();

  bool operator==(const InstancePair&) const = default;
};

// Label in the task's inventory and coarse label equal to its parent.
void validate_instance(const InstancePair& pair, const TaskSpecs& specs);

nlohmann::ordered_json to_json(const InstancePair& pair);
InstancePair instance_from_json(const nlohmann::json& j);

// Errors name the source and 1-based line number.
std::vector<InstancePair> read_jsonl(std::istream& in, const TaskSpecs& specs,
                                     const std::string& source = "<stream>");
std::vector<InstancePair> load_jsonl(const std::filesystem::path& path,
                                     const TaskSpecs& specs);
void save_jsonl(const std::filesystem::path& path, std::span<const InstancePair> pairs);

// Clears the connective of explicit instances. Argument text and labels are
// untouched. Throws DataError on an instance without a connective.
std::vector<InstancePair> strip_connectives(std::span<const InstancePair> explicit_pairs);

// Keeps at most `cap` instances per fine label, highest confidence first,
// ties by ascending id. Output keeps the input order of survivors.
std::vector<InstancePair> cap_per_category(std::span<const InstancePair> pairs,
                                           std::size_t cap);

struct Splits {
  std::vector<InstancePair> train;
  std::vector<InstancePair> dev;
  std::vector<InstancePair> test;
};

// Per-fine-label stratified dev/test sampling; the remainder is train.
// Each label contributes round(n * share) items, largest remainders first.
Splits stratified_split(std::span<const InstancePair> pairs, std::size_t n_dev,
                        std::size_t n_test, std::uint64_t seed);

// Split files referenced by a manifest, keyed "ere_train", "drr_dev", ...
struct DatasetManifest {
  TaskSpecs specs;
  struct Entry {
    std::string path;  // relative to the manifest's directory
    std::size_t count = 0;
  };
  std::map<std::string, Entry> splits;
  nlohmann::ordered_json provenance = nlohmann::ordered_json::object();

  nlohmann::ordered_json to_json() const;
};

void save_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);
// Checks that every split file exists and holds the recorded count.
DatasetManifest load_manifest(const std::filesystem::path& path);
// Loads one split named in the manifest.
std::vector<InstancePair> load_split(const std::filesystem::path& manifest_path,
                                     const DatasetManifest& manifest,
                                     const std::string& split);

MKP_NAMESPACE_END

#endif  // MKP_DATA_HPP_
