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

#include "hanforge/metrics.hpp"

#include <map>
#include <set>
#include <tuple>

namespace hanforge {

namespace {

using Key = std::tuple<std::size_t, std::size_t, std::string>;

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

void SpanF1::add(std::span<const Item> gold, std::span<const Item> predicted) {
  std::multiset<Key> g;
  for (const auto& it : gold) g.emplace(it.span.begin, it.span.end, it.category);
  gold_ += gold.size();
  predicted_ += predicted.size();
  for (const auto& it : predicted) {
    auto found = g.find(Key(it.span.begin, it.span.end, it.category));
    if (found != g.end()) {
      ++correct_;
      g.erase(found);
    }
  }
}

double SpanF1::precision() const { return ratio(correct_, predicted_); }
double SpanF1::recall() const { return ratio(correct_, gold_); }

double SpanF1::f1() const {
  if (gold_ == 0 && predicted_ == 0) return 1.0;
  const double p = precision();
  const double r = recall();
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

std::vector<SpanF1::Item> segmentation_items(const Segmentation& seg) {
  std::vector<SpanF1::Item> out;
  for (const Span& s : seg.spans()) out.push_back({s, ""});
  return out;
}

std::vector<SpanF1::Item> tagged_items(const Segmentation& seg, std::span<const std::string> tags) {
  std::vector<SpanF1::Item> out;
  for (std::size_t i = 0; i < seg.size(); ++i) out.push_back({seg.spans()[i], tags[i]});
  return out;
}

std::vector<SpanF1::Item> entity_items(std::span<const Entity> entities) {
  std::vector<SpanF1::Item> out;
  for (const auto& e : entities) out.push_back({e.span, e.category});
  return out;
}

void AttachmentScore::add(const Segmentation& gold_seg, std::span<const int> gold_heads,
                          std::span<const std::string> gold_rels, const Segmentation& pred_seg,
                          std::span<const int> pred_heads,
                          std::span<const std::string> pred_rels) {
  // Head span of token i under a segmentation; the root is (0, 0).
  auto head_span = [](const Segmentation& seg, int head) {
    return head == 0 ? Span{0, 0} : seg.spans()[head - 1];
  };
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> pred_index;
  for (std::size_t i = 0; i < pred_seg.size(); ++i) {
    pred_index[{pred_seg.spans()[i].begin, pred_seg.spans()[i].end}] = i;
  }
  total_ += gold_seg.size();
  for (std::size_t i = 0; i < gold_seg.size(); ++i) {
    auto it = pred_index.find({gold_seg.spans()[i].begin, gold_seg.spans()[i].end});
    if (it == pred_index.end()) continue;
    const std::size_t p = it->second;
    if (head_span(gold_seg, gold_heads[i]) == head_span(pred_seg, pred_heads[p])) {
      ++unlabeled_;
      if (gold_rels[i] == pred_rels[p]) ++labeled_;
    }
  }
}

double AttachmentScore::uas() const { return ratio(unlabeled_, total_); }
double AttachmentScore::las() const { return ratio(labeled_, total_); }

}  // namespace hanforge
