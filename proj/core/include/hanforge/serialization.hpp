// Copyright 2026 The Hanforge Authors.
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

#ifndef HANFORGE_SERIALIZATION_HPP_
#define HANFORGE_SERIALIZATION_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>

#include "hanforge/model.hpp"

namespace hanforge {

// Container layout:
//   "HANFORGE" | u32 version | u64 manifest size | manifest (JSON) |
//   tensor data (float32, little-endian, row-major) | u32 CRC-32 of all
//   preceding bytes.
// The manifest holds the model config, corpus tags, characters, label
// inventories and, per tensor, its name, shape and byte offset into the
// data section.
inline constexpr std::uint32_t kFormatVersion = 1;

// Throws IoError.
void save_model(const Model& model, const std::string& path);
void write_model(const Model& model, std::ostream& out);

// Throws IoError, FormatVersionMismatch, CorruptContainer.
Model load_model(const std::string& path);
Model read_model(std::istream& in);

// Manifest of a container without materializing tensors, as JSON text.
std::string read_manifest(const std::string& path);

}  // namespace hanforge

#endif  // HANFORGE_SERIALIZATION_HPP_
