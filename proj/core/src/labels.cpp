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

#include "hanforge/labels.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "hanforge/error.hpp"

namespace hanforge {

std::string_view task_name(Task task) {
  switch (task) {
    case Task::kCws: return "CWS";
    case Task::kPos: return "POS";
    case Task::kNer: return "NER";
    case Task::kDep: return "DEP";
  }
  return "?";
}

std::optional<Task> parse_task(std::string_view name) {
  std::string upper(name);
  for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (upper == "CWS") return Task::kCws;
  if (upper == "POS") return Task::kPos;
  if (upper == "NER") return Task::kNer;
  if (upper == "DEP") return Task::kDep;
  return std::nullopt;
}

char positional_char(Positional p) {
  switch (p) {
    case Positional::kB: return 'B';
    case Positional::kM: return 'M';
    case Positional::kE: return 'E';
    case Positional::kS: return 'S';
    case Positional::kO: return 'O';
  }
  return '?';
}

std::optional<LabelParts> split_label(std::string_view label) {
  if (label.empty()) return std::nullopt;
  Positional p;
  switch (label[0]) {
    case 'B': p = Positional::kB; break;
    case 'M': p = Positional::kM; break;
    case 'E': p = Positional::kE; break;
    case 'S': p = Positional::kS; break;
    case 'O': p = Positional::kO; break;
    default: return std::nullopt;
  }
  if (label.size() == 1) return LabelParts{p, ""};
  if (p == Positional::kO || label[1] != '-' || label.size() == 2) return std::nullopt;
  return LabelParts{p, std::string(label.substr(2))};
}

std::string join_label(Positional p, std::string_view category) {
  std::string out(1, positional_char(p));
  if (!category.empty()) {
    out += '-';
    out += category;
  }
  return out;
}

bool legal_transition(const LabelParts& from, const LabelParts& to) {
  switch (from.positional) {
    case Positional::kB:
    case Positional::kM:
      return (to.positional == Positional::kM || to.positional == Positional::kE) &&
             from.category == to.category;
    case Positional::kE:
    case Positional::kS:
    case Positional::kO:
      return to.positional == Positional::kB || to.positional == Positional::kS ||
             to.positional == Positional::kO;
  }
  return false;
}

bool legal_start(const LabelParts& label) {
  return label.positional == Positional::kB || label.positional == Positional::kS ||
         label.positional == Positional::kO;
}

bool legal_end(const LabelParts& label) {
  return label.positional == Positional::kE || label.positional == Positional::kS ||
         label.positional == Positional::kO;
}

LabelScheme::LabelScheme(Task task, std::vector<std::string> labels) : task_(task) {
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  labels_ = std::move(labels);
  std::set<std::string> categories;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    auto parts = split_label(labels_[i]);
    if (!parts) throw Error(ErrorCode::kConfigError, "malformed label '" + labels_[i] + "'");
    if (!parts->category.empty()) categories.insert(parts->category);
    parts_.push_back(*parts);
    index_.emplace(labels_[i], i);
  }
  categories_.assign(categories.begin(), categories.end());
}

LabelScheme LabelScheme::cws() {
  return LabelScheme(Task::kCws, {"B", "M", "E", "S"});
}

namespace {

std::vector<std::string> cross_labels(std::span<const std::string> categories) {
  std::vector<std::string> labels;
  for (const auto& c : categories) {
    if (c.empty() || c.find_first_of(" \t\n") != std::string::npos) {
      throw Error(ErrorCode::kConfigError, "bad category '" + c + "'");
    }
    for (Positional p : {Positional::kB, Positional::kM, Positional::kE, Positional::kS}) {
      labels.push_back(join_label(p, c));
    }
  }
  return labels;
}

}  // namespace

LabelScheme LabelScheme::pos(std::span<const std::string> categories) {
  return LabelScheme(Task::kPos, cross_labels(categories));
}

LabelScheme LabelScheme::ner(std::span<const std::string> categories) {
  auto labels = cross_labels(categories);
  labels.emplace_back("O");
  return LabelScheme(Task::kNer, std::move(labels));
}

std::optional<std::size_t> LabelScheme::index_of(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool LabelScheme::legal(std::size_t from, std::size_t to) const {
  return legal_transition(parts_[from], parts_[to]);
}

bool LabelScheme::legal_start(std::size_t index) const {
  return hanforge::legal_start(parts_[index]);
}

bool LabelScheme::legal_end(std::size_t index) const {
  return hanforge::legal_end(parts_[index]);
}

void LabelScheme::validate(std::span<const std::string> labels) const {
  std::optional<std::size_t> prev;
  for (std::size_t t = 0; t < labels.size(); ++t) {
    auto idx = index_of(labels[t]);
    if (!idx) {
      throw Error(ErrorCode::kIllegalSequence,
                  "label '" + labels[t] + "' at " + std::to_string(t) + " not in scheme");
    }
    if (!prev ? !legal_start(*idx) : !legal(*prev, *idx)) {
      throw Error(ErrorCode::kIllegalSequence,
                  "illegal label '" + labels[t] + "' at position " + std::to_string(t));
    }
    prev = idx;
  }
  if (prev && !legal_end(*prev)) {
    throw Error(ErrorCode::kIllegalSequence, "sequence ends with '" + labels.back() + "'");
  }
}

}  // namespace hanforge
