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

#include "hanforge/vocabulary.hpp"

#include <algorithm>

#include "hanforge/error.hpp"

namespace hanforge {

Vocabulary::Vocabulary(std::span<const TagSpec> tags, std::vector<std::string> chars) {
  int next = 2;
  for (const auto& spec : tags) {
    if (spec.name.empty()) throw Error(ErrorCode::kConfigError, "empty corpus tag name");
    if (has_tag(spec.name)) {
      throw Error(ErrorCode::kConfigError, "duplicate corpus tag '" + spec.name + "'");
    }
    tags_.push_back({spec.name, spec.task, next++});
  }
  std::sort(chars.begin(), chars.end());
  chars.erase(std::unique(chars.begin(), chars.end()), chars.end());
  chars_ = std::move(chars);
  for (const auto& ch : chars_) char_ids_.emplace(ch, next++);
}

int Vocabulary::id(std::string_view ch) const {
  auto it = char_ids_.find(std::string(ch));
  return it == char_ids_.end() ? kUnk : it->second;
}

std::vector<int> Vocabulary::encode(std::span<const std::string> chars) const {
  std::vector<int> ids;
  ids.reserve(chars.size());
  for (const auto& ch : chars) ids.push_back(id(ch));
  return ids;
}

const CorpusTag& Vocabulary::tag(std::string_view name) const {
  for (const auto& t : tags_) {
    if (t.name == name) return t;
  }
  throw Error(ErrorCode::kUnknownTag, "no corpus tag named '" + std::string(name) + "'");
}

bool Vocabulary::has_tag(std::string_view name) const {
  return std::any_of(tags_.begin(), tags_.end(), [&](const CorpusTag& t) { return t.name == name; });
}

const CorpusTag* Vocabulary::default_tag(Task task) const {
  for (const auto& t : tags_) {
    if (t.task == task) return &t;
  }
  return nullptr;
}

}  // namespace hanforge
