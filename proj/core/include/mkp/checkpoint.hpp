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
#ifndef MKP_CHECKPOINT_HPP_
#define MKP_CHECKPOINT_HPP_

#include <filesystem>
#include <span>

#include "mkp/optim.hpp"

MKP_NAMESPACE_BEGIN

// Checkpoint layout inside `dir`:
//   params.json  {"format", "dtype": "float32", "byte_order": "little",
//                 "blob": "params.bin",
//                 "params": [{"name", "shape", "offset"}, ...]}
//   params.bin   little-endian float32 values concatenated in manifest
//                order; "offset" is the byte offset of each parameter.
inline constexpr const char* kCheckpointManifest = "params.json";
inline constexpr const char* kCheckpointBlob = "params.bin";

void save_checkpoint(const std::filesystem::path& dir,
                     std::span<const NamedTensor> params);

// Fills `params` by name. Every parameter must be present with a matching
// shape; extra entries in the checkpoint are an error too.
void load_checkpoint(const std::filesystem::path& dir,
                     std::span<const NamedTensor> params);

MKP_NAMESPACE_END

#endif  // MKP_CHECKPOINT_HPP_
