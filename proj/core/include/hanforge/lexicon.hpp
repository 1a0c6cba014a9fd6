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

#ifndef HANFORGE_LEXICON_HPP_
#define HANFORGE_LEXICON_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "hanforge/labels.hpp"
#include "hanforge/tensor.hpp"

namespace hanforge {

// A user word list plus the weight applied to its decoding bias.
// Mutations must not interleave with decodes that read the lexicon.
class Lexicon {
 public:
  static constexpr double kDefaultWeight = 0.05;

  Lexicon() = default;

  // Throws EmptyWord. Adding an existing word is a no-op.
  void add_word(std::string_view word);
  // Throws NegativeWeight for w < 0 or non-finite w.
  void set_weight(double w);

  // One word per line, UTF-8; blank lines are skipped. Throws IoError.
  static Lexicon load(const std::string& path);

  bool contains(std::string_view word) const { return words_.count(std::string(word)) > 0; }
  std::size_t size() const { return words_.size(); }
  std::size_t max_word_chars() const { return max_chars_; }
  double weight() const { return weight_; }

 private:
  std::unordered_set<std::string> words_;
  std::size_t max_chars_ = 0;
  double weight_ = kDefaultWeight;
};

// Forward maximum matching: at each position take the longest lexicon word
// of at least two characters, otherwise a single character. Returns BMES
// labels ("B", "M", "E", "S").
std::vector<std::string> max_match(std::span<const std::string> chars, const Lexicon& lexicon);

// Per-position bias magnitude b_t = (max_l em(t, l) - mean_l em(t, l)) * w and
// the skeleton label it supports. Positions not covered by a matched word
// carry no target and receive no bias.
struct BiasVector {
  std::vector<double> magnitude;
  std::vector<std::optional<Positional>> target;
};

BiasVector compute_bias(const Matrix& emissions, std::span<const std::string> skeleton, double w);

// Spreads the bias onto a T x L matrix for `scheme`: each targeted position
// adds b_t to every label whose positional prefix equals the target.
Matrix bias_matrix(const BiasVector& bias, const LabelScheme& scheme);

}  // namespace hanforge

#endif  // HANFORGE_LEXICON_HPP_
