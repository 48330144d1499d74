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
#include "mkp/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>

MKP_NAMESPACE_BEGIN

namespace {

using json = nlohmann::json;

std::uint32_t to_le(std::uint32_t x) {
  if constexpr (std::endian::native == std::endian::little) {
    return x;
  } else {
    return ((x & 0xffu) << 24) | ((x & 0xff00u) << 8) | ((x >> 8) & 0xff00u) | (x >> 24);
  }
}

}  // namespace

void save_checkpoint(const std::filesystem::path& dir,
                     std::span<const NamedTensor> params) {
  std::filesystem::create_directories(dir);
  json manifest;
  manifest["format"] = "mkp-checkpoint-v1";
  manifest["dtype"] = "float32";
  manifest["byte_order"] = "little";
  manifest["blob"] = kCheckpointBlob;
  json entries = json::array();

  std::ofstream blob(dir / kCheckpointBlob, std::ios::binary | std::ios::trunc);
  if (!blob) throw DataError("cannot write " + (dir / kCheckpointBlob).string());
  std::uint64_t offset = 0;
  for (const auto& p : params) {
    entries.push_back({{"name", p.name}, {"shape", p.tensor.shape()}, {"offset", offset}});
    for (Real v : p.tensor.values()) {
      const float f = static_cast<float>(v);
      std::uint32_t bits;
      std::memcpy(&bits, &f, sizeof bits);
      bits = to_le(bits);
      blob.write(reinterpret_cast<const char*>(&bits), sizeof bits);
    }
    offset += p.tensor.numel() * sizeof(float);
  }
  manifest["params"] = std::move(entries);
  std::ofstream out(dir / kCheckpointManifest, std::ios::trunc);
  if (!out) throw DataError("cannot write " + (dir / kCheckpointManifest).string());
  out << manifest.dump(2) << '\n';
}

void load_checkpoint(const std::filesystem::path& dir,
                     std::span<const NamedTensor> params) {
  std::ifstream in(dir / kCheckpointManifest);
  if (!in) throw DataError("cannot read " + (dir / kCheckpointManifest).string());
  json manifest;
  try {
    manifest = json::parse(in);
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed checkpoint manifest: ") + e.what());
  }
  if (manifest.value("dtype", "") != "float32") {
    throw DataError("checkpoint dtype must be float32");
  }
  std::ifstream blob(dir / manifest.value("blob", std::string(kCheckpointBlob)),
                     std::ios::binary);
  if (!blob) throw DataError("cannot read checkpoint blob in " + dir.string());

  std::map<std::string, json> by_name;
  for (const auto& e : manifest.at("params")) by_name[e.at("name")] = e;
  if (by_name.size() != params.size()) {
    throw DataError("checkpoint holds " + std::to_string(by_name.size()) +
                    " parameters, model expects " + std::to_string(params.size()));
  }
  for (const auto& p : params) {
    auto it = by_name.find(p.name);
    if (it == by_name.end()) throw DataError("checkpoint lacks parameter '" + p.name + "'");
    const Shape shape = it->second.at("shape").get<Shape>();
    if (shape != p.tensor.shape()) {
      throw DataError("checkpoint shape " + shape_string(shape) + " for '" + p.name +
                      "' does not match model " + shape_string(p.tensor.shape()));
    }
    blob.seekg(static_cast<std::streamoff>(it->second.at("offset").get<std::uint64_t>()));
    Tensor t = p.tensor;
    for (Real& v : t.mutable_values()) {
      std::uint32_t bits;
      if (!blob.read(reinterpret_cast<char*>(&bits), sizeof bits)) {
        throw DataError("checkpoint blob truncated at '" + p.name + "'");
      }
      bits = to_le(bits);
      float f;
      std::memcpy(&f, &bits, sizeof f);
      v = static_cast<Real>(f);
    }
  }
}

MKP_NAMESPACE_END
