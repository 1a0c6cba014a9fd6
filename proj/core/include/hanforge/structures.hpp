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

#ifndef HANFORGE_STRUCTURES_HPP_
#define HANFORGE_STRUCTURES_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace hanforge {

struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;  // exclusive
  std::size_t size() const { return end - begin; }
  friend bool operator==(const Span&, const Span&) = default;
};

// A sentence's characters together with a contiguous, non-overlapping cover
// of token spans.
class Segmentation {
 public:
  Segmentation() = default;
  // Throws SpanMismatch unless spans tile [0, chars.size()) in order.
  Segmentation(std::vector<std::string> chars, std::vector<Span> spans);

  static Segmentation from_tokens(std::span<const std::string> tokens);

  const std::vector<std::string>& chars() const { return chars_; }
  const std::vector<Span>& spans() const { return spans_; }
  std::size_t size() const { return spans_.size(); }
  std::string token(std::size_t i) const;
  std::vector<std::string> tokens() const;

  friend bool operator==(const Segmentation&, const Segmentation&) = default;

 private:
  std::vector<std::string> chars_;
  std::vector<Span> spans_;
};

struct TaggedTokens {
  Segmentation segmentation;
  std::vector<std::string> tags;
  friend bool operator==(const TaggedTokens&, const TaggedTokens&) = default;
};

struct Entity {
  Span span;
  std::string category;
  friend bool operator==(const Entity&, const Entity&) = default;
};

// heads[i] is the 1-based head of token i+1, or 0 for the virtual root.
struct DepTree {
  std::vector<std::string> tokens;
  std::vector<int> heads;
  std::vector<std::string> rels;

  std::size_t size() const { return heads.size(); }
  // Exactly one root child, every token reaches the root, no cycles.
  bool is_well_formed() const;
  friend bool operator==(const DepTree&, const DepTree&) = default;
};

bool is_single_root_tree(std::span<const int> heads);

}  // namespace hanforge

#endif  // HANFORGE_STRUCTURES_HPP_
