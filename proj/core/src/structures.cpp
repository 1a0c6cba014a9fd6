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

#include "hanforge/structures.hpp"

#include "hanforge/error.hpp"
#include "hanforge/text.hpp"

namespace hanforge {

Segmentation::Segmentation(std::vector<std::string> chars, std::vector<Span> spans)
    : chars_(std::move(chars)), spans_(std::move(spans)) {
  std::size_t pos = 0;
  for (const Span& s : spans_) {
    if (s.begin != pos || s.end <= s.begin) {
      throw Error(ErrorCode::kSpanMismatch, "token spans must tile the sentence");
    }
    pos = s.end;
  }
  if (pos != chars_.size()) {
    throw Error(ErrorCode::kSpanMismatch, "token spans cover " + std::to_string(pos) + " of " +
                                              std::to_string(chars_.size()) + " characters");
  }
}

Segmentation Segmentation::from_tokens(std::span<const std::string> tokens) {
  std::vector<std::string> chars;
  std::vector<Span> spans;
  for (const auto& tok : tokens) {
    auto tc = split_chars(tok);
    if (tc.empty()) throw Error(ErrorCode::kSpanMismatch, "empty token");
    spans.push_back({chars.size(), chars.size() + tc.size()});
    chars.insert(chars.end(), tc.begin(), tc.end());
  }
  return Segmentation(std::move(chars), std::move(spans));
}

std::string Segmentation::token(std::size_t i) const {
  return join_chars(chars_, spans_[i].begin, spans_[i].end);
}

std::vector<std::string> Segmentation::tokens() const {
  std::vector<std::string> out;
  out.reserve(spans_.size());
  for (std::size_t i = 0; i < spans_.size(); ++i) out.push_back(token(i));
  return out;
}

bool is_single_root_tree(std::span<const int> heads) {
  const int n = static_cast<int>(heads.size());
  if (n == 0) return false;
  int root_children = 0;
  for (int h : heads) {
    if (h < 0 || h > n) return false;
    if (h == 0) ++root_children;
  }
  if (root_children != 1) return false;
  // Walk up from every token; more than n steps means a cycle.
  for (int i = 1; i <= n; ++i) {
    int node = i;
    int steps = 0;
    while (node != 0) {
      if (heads[node - 1] == node || ++steps > n) return false;
      node = heads[node - 1];
    }
  }
  return true;
}

bool DepTree::is_well_formed() const {
  if (tokens.size() != heads.size() || rels.size() != heads.size()) return false;
  return is_single_root_tree(heads);
}

}  // namespace hanforge
