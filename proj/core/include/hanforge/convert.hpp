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

#ifndef HANFORGE_CONVERT_HPP_
#define HANFORGE_CONVERT_HPP_

#include <span>
#include <string>
#include <vector>

#include "hanforge/structures.hpp"

namespace hanforge {

// Conversions between linguistic structures and per-character label
// sequences. Decoders throw IllegalSequence on any transition the scheme
// forbids.

std::vector<std::string> encode_bmes(const Segmentation& seg);
Segmentation decode_bmes(std::span<const std::string> chars, std::span<const std::string> labels);

std::vector<std::string> encode_cross(const Segmentation& seg, std::span<const std::string> tags);
TaggedTokens decode_cross(std::span<const std::string> chars, std::span<const std::string> labels);

std::vector<Entity> decode_ner(std::span<const std::string> chars,
                               std::span<const std::string> labels);

}  // namespace hanforge

#endif  // HANFORGE_CONVERT_HPP_
