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

#ifndef HANFORGE_METRICS_HPP_
#define HANFORGE_METRICS_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hanforge/structures.hpp"

namespace hanforge {

// Exact-match span F1: a predicted (span, category) counts only if the same
// pair is in the gold set.
class SpanF1 {
 public:
  struct Item {
    Span span;
    std::string category;
  };

  void add(std::span<const Item> gold, std::span<const Item> predicted);

  std::size_t gold_count() const { return gold_; }
  std::size_t predicted_count() const { return predicted_; }
  std::size_t correct_count() const { return correct_; }
  double precision() const;
  double recall() const;
  double f1() const;

 private:
  std::size_t gold_ = 0, predicted_ = 0, correct_ = 0;
};

std::vector<SpanF1::Item> segmentation_items(const Segmentation& seg);
std::vector<SpanF1::Item> tagged_items(const Segmentation& seg, std::span<const std::string> tags);
std::vector<SpanF1::Item> entity_items(std::span<const Entity> entities);

// Attachment scores over all gold tokens. A gold token scores when the
// prediction has a token with the same character span whose head covers the
// same span (and, for LAS, whose relation matches), so differing
// segmentations are handled.
class AttachmentScore {
 public:
  void add(const Segmentation& gold_seg, std::span<const int> gold_heads,
           std::span<const std::string> gold_rels, const Segmentation& pred_seg,
           std::span<const int> pred_heads, std::span<const std::string> pred_rels);

  std::size_t total() const { return total_; }
  double uas() const;
  double las() const;

 private:
  std::size_t total_ = 0, unlabeled_ = 0, labeled_ = 0;
};

}  // namespace hanforge

#endif  // HANFORGE_METRICS_HPP_
