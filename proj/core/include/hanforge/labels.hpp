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

#ifndef HANFORGE_LABELS_HPP_
#define HANFORGE_LABELS_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace hanforge {

enum class Task { kCws, kPos, kNer, kDep };

std::string_view task_name(Task task);
// Accepts "CWS", "POS", "NER", "DEP" (case-insensitive).
std::optional<Task> parse_task(std::string_view name);

enum class Positional { kB, kM, kE, kS, kO };

char positional_char(Positional p);

// A label split into its positional prefix and optional category:
// "B" -> (B, ""), "B-NN" -> (B, "NN"), "O" -> (O, "").
struct LabelParts {
  Positional positional;
  std::string category;
};

std::optional<LabelParts> split_label(std::string_view label);
std::string join_label(Positional p, std::string_view category);

// legal(a, b): a may be followed by b.
bool legal_transition(const LabelParts& from, const LabelParts& to);
bool legal_start(const LabelParts& label);
bool legal_end(const LabelParts& label);

// An ordered tag inventory for one sequence-labeling task. Labels are sorted
// at construction so indices are stable across save/load.
class LabelScheme {
 public:
  LabelScheme() = default;

  static LabelScheme cws();
  // Cross labels P-C for every P in BMES and every category.
  static LabelScheme pos(std::span<const std::string> categories);
  // Cross labels P-C plus the bare "O" label.
  static LabelScheme ner(std::span<const std::string> categories);

  Task task() const { return task_; }
  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(std::size_t index) const { return labels_.at(index); }
  // Sorted, deduplicated category list (empty for CWS).
  const std::vector<std::string>& categories() const { return categories_; }

  std::optional<std::size_t> index_of(std::string_view label) const;
  Positional positional(std::size_t index) const { return parts_[index].positional; }
  const std::string& category(std::size_t index) const { return parts_[index].category; }

  bool legal(std::size_t from, std::size_t to) const;
  bool legal_start(std::size_t index) const;
  bool legal_end(std::size_t index) const;

  // Throws IllegalSequence if any label is unknown or any transition,
  // including the start and end boundaries, is illegal.
  void validate(std::span<const std::string> labels) const;

  friend bool operator==(const LabelScheme& a, const LabelScheme& b) {
    return a.task_ == b.task_ && a.labels_ == b.labels_;
  }

 private:
  LabelScheme(Task task, std::vector<std::string> labels);

  Task task_ = Task::kCws;
  std::vector<std::string> labels_;
  std::vector<LabelParts> parts_;
  std::vector<std::string> categories_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace hanforge

#endif  // HANFORGE_LABELS_HPP_
