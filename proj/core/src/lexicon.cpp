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

#include "hanforge/lexicon.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "hanforge/error.hpp"
#include "hanforge/text.hpp"

namespace hanforge {

void Lexicon::add_word(std::string_view word) {
  if (trim(word).empty()) throw Error(ErrorCode::kEmptyWord, "lexicon words must be non-empty");
  std::string w(trim(word));
  max_chars_ = std::max(max_chars_, split_chars(w).size());
  words_.insert(std::move(w));
}

void Lexicon::set_weight(double w) {
  if (!(w >= 0.0) || !std::isfinite(w)) {
    throw Error(ErrorCode::kNegativeWeight, "lexicon weight must be a finite value >= 0");
  }
  weight_ = w;
}

Lexicon Lexicon::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open lexicon '" + path + "'");
  Lexicon lex;
  std::string line;
  while (std::getline(in, line)) {
    if (!trim(line).empty()) lex.add_word(line);
  }
  return lex;
}

std::vector<std::string> max_match(std::span<const std::string> chars, const Lexicon& lexicon) {
  std::vector<std::string> labels;
  labels.reserve(chars.size());
  std::size_t i = 0;
  while (i < chars.size()) {
    std::size_t matched = 1;
    const std::size_t longest = std::min(lexicon.max_word_chars(), chars.size() - i);
    for (std::size_t len = longest; len >= 2; --len) {
      if (lexicon.contains(join_chars(chars, i, i + len))) {
        matched = len;
        break;
      }
    }
    if (matched == 1) {
      labels.emplace_back("S");
    } else {
      labels.emplace_back("B");
      for (std::size_t k = 2; k < matched; ++k) labels.emplace_back("M");
      labels.emplace_back("E");
    }
    i += matched;
  }
  return labels;
}

BiasVector compute_bias(const Matrix& emissions, std::span<const std::string> skeleton, double w) {
  if (static_cast<std::size_t>(emissions.rows()) != skeleton.size()) {
    throw Error(ErrorCode::kSpanMismatch, "skeleton length differs from emission rows");
  }
  BiasVector out;
  out.magnitude.resize(skeleton.size());
  out.target.resize(skeleton.size());
  for (std::size_t t = 0; t < skeleton.size(); ++t) {
    const auto row = emissions.row(t);
    out.magnitude[t] = (row.maxCoeff() - row.mean()) * w;
    auto parts = split_label(skeleton[t]);
    if (parts && parts->positional != Positional::kS && parts->positional != Positional::kO) {
      out.target[t] = parts->positional;
    }
  }
  return out;
}

Matrix bias_matrix(const BiasVector& bias, const LabelScheme& scheme) {
  Matrix m = Matrix::Zero(bias.magnitude.size(), scheme.size());
  for (std::size_t t = 0; t < bias.magnitude.size(); ++t) {
    if (!bias.target[t]) continue;
    for (std::size_t l = 0; l < scheme.size(); ++l) {
      if (scheme.positional(l) == *bias.target[t]) m(t, l) += bias.magnitude[t];
    }
  }
  return m;
}

}  // namespace hanforge
