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

#ifndef HANFORGE_VOCABULARY_HPP_
#define HANFORGE_VOCABULARY_HPP_

#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hanforge/labels.hpp"

namespace hanforge {

// Identifies one corpus (and therefore one task and annotation criterion).
// Its vocab_id row in the embedding table is an ordinary trainable row.
struct CorpusTag {
  std::string name;
  Task task = Task::kCws;
  int vocab_id = 0;
  friend bool operator==(const CorpusTag&, const CorpusTag&) = default;
};

struct TagSpec {
  std::string name;
  Task task;
};

// Dense id space: PAD=0, UNK=1, one id per corpus tag, then characters in
// sorted order.
class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;

  Vocabulary() = default;
  // Throws ConfigError on duplicate tag names. Characters are deduplicated.
  Vocabulary(std::span<const TagSpec> tags, std::vector<std::string> chars);

  int size() const { return static_cast<int>(2 + tags_.size() + chars_.size()); }
  int id(std::string_view ch) const;
  std::vector<int> encode(std::span<const std::string> chars) const;

  const std::vector<CorpusTag>& tags() const { return tags_; }
  const std::vector<std::string>& chars() const { return chars_; }
  // Throws UnknownTag.
  const CorpusTag& tag(std::string_view name) const;
  bool has_tag(std::string_view name) const;
  // First registered tag for the task, or nullptr.
  const CorpusTag* default_tag(Task task) const;

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.tags_ == b.tags_ && a.chars_ == b.chars_;
  }

 private:
  std::vector<CorpusTag> tags_;
  std::vector<std::string> chars_;
  std::unordered_map<std::string, int> char_ids_;
};

}  // namespace hanforge

#endif  // HANFORGE_VOCABULARY_HPP_
