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

#include "hanforge/convert.hpp"

#include <optional>

#include "hanforge/error.hpp"
#include "hanforge/labels.hpp"

namespace hanforge {

namespace {

struct ParsedToken {
  Span span;
  std::string category;
  bool outside = false;  // an O run of one char
};

// Shared walker for every BMES-style scheme: checks legality label by label
// and groups characters into tokens.
std::vector<ParsedToken> parse_labels(std::size_t num_chars, std::span<const std::string> labels,
                                      bool allow_outside) {
  if (labels.size() != num_chars) {
    throw Error(ErrorCode::kIllegalSequence, "label count " + std::to_string(labels.size()) +
                                                 " != char count " + std::to_string(num_chars));
  }
  std::vector<ParsedToken> tokens;
  std::optional<LabelParts> prev;
  std::size_t open = 0;
  for (std::size_t t = 0; t < labels.size(); ++t) {
    auto parts = split_label(labels[t]);
    if (!parts || (!allow_outside && parts->positional == Positional::kO)) {
      throw Error(ErrorCode::kIllegalSequence, "bad label '" + labels[t] + "'");
    }
    bool ok = prev ? legal_transition(*prev, *parts) : legal_start(*parts);
    if (!ok) {
      throw Error(ErrorCode::kIllegalSequence,
                  "illegal label '" + labels[t] + "' at position " + std::to_string(t));
    }
    switch (parts->positional) {
      case Positional::kB:
        open = t;
        break;
      case Positional::kM:
        break;
      case Positional::kE:
        tokens.push_back({{open, t + 1}, parts->category, false});
        break;
      case Positional::kS:
        tokens.push_back({{t, t + 1}, parts->category, false});
        break;
      case Positional::kO:
        tokens.push_back({{t, t + 1}, "", true});
        break;
    }
    prev = std::move(parts);
  }
  if (prev && !legal_end(*prev)) {
    throw Error(ErrorCode::kIllegalSequence, "sequence ends inside a token");
  }
  return tokens;
}

void append_token_labels(std::vector<std::string>& out, std::size_t len,
                         const std::string& category) {
  if (len == 1) {
    out.push_back(join_label(Positional::kS, category));
    return;
  }
  out.push_back(join_label(Positional::kB, category));
  for (std::size_t k = 2; k < len; ++k) out.push_back(join_label(Positional::kM, category));
  out.push_back(join_label(Positional::kE, category));
}

}  // namespace

std::vector<std::string> encode_bmes(const Segmentation& seg) {
  std::vector<std::string> out;
  out.reserve(seg.chars().size());
  for (const Span& s : seg.spans()) append_token_labels(out, s.size(), "");
  return out;
}

Segmentation decode_bmes(std::span<const std::string> chars, std::span<const std::string> labels) {
  std::vector<Span> spans;
  for (const auto& tok : parse_labels(chars.size(), labels, false)) {
    if (!tok.category.empty()) {
      throw Error(ErrorCode::kIllegalSequence, "segmentation labels carry no category");
    }
    spans.push_back(tok.span);
  }
  return Segmentation({chars.begin(), chars.end()}, std::move(spans));
}

std::vector<std::string> encode_cross(const Segmentation& seg, std::span<const std::string> tags) {
  if (tags.size() != seg.size()) {
    throw Error(ErrorCode::kSpanMismatch, "one tag per token required");
  }
  std::vector<std::string> out;
  out.reserve(seg.chars().size());
  for (std::size_t i = 0; i < seg.size(); ++i) {
    append_token_labels(out, seg.spans()[i].size(), tags[i]);
  }
  return out;
}

TaggedTokens decode_cross(std::span<const std::string> chars, std::span<const std::string> labels) {
  std::vector<Span> spans;
  std::vector<std::string> tags;
  for (auto& tok : parse_labels(chars.size(), labels, false)) {
    if (tok.category.empty()) {
      throw Error(ErrorCode::kIllegalSequence, "cross label without category");
    }
    spans.push_back(tok.span);
    tags.push_back(std::move(tok.category));
  }
  return {Segmentation({chars.begin(), chars.end()}, std::move(spans)), std::move(tags)};
}

std::vector<Entity> decode_ner(std::span<const std::string> chars,
                               std::span<const std::string> labels) {
  std::vector<Entity> out;
  for (auto& tok : parse_labels(chars.size(), labels, true)) {
    if (tok.outside) continue;
    if (tok.category.empty()) {
      throw Error(ErrorCode::kIllegalSequence, "entity label without category");
    }
    out.push_back({tok.span, std::move(tok.category)});
  }
  return out;
}

}  // namespace hanforge
