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

#ifndef HANFORGE_BIAFFINE_HPP_
#define HANFORGE_BIAFFINE_HPP_

#include <span>
#include <string>
#include <vector>

#include "hanforge/structures.hpp"
#include "hanforge/tensor.hpp"

namespace hanforge {

struct BiaffineConfig {
  int arc_dim = 64;
  int label_dim = 32;
  friend bool operator==(const BiaffineConfig&, const BiaffineConfig&) = default;
};

struct BiaffineParams {
  Matrix root;           // 1 x d, learned ROOT token vector
  Matrix pos_embedding;  // |POS categories| x d
  Matrix arc_dep_w, arc_dep_b, arc_head_w, arc_head_b;        // d -> arc_dim
  Matrix label_dep_w, label_dep_b, label_head_w, label_head_b;  // d -> label_dim
  Matrix arc_w;    // (arc_dim + 1) x arc_dim
  Matrix label_w;  // |rels| stacked blocks of (label_dim + 1) x (label_dim + 1)

  static BiaffineParams init(int hidden, const BiaffineConfig& config, int num_pos, int num_rels,
                             Rng& rng);
  BiaffineParams zeros_like() const;
  int num_rels() const { return static_cast<int>(label_w.rows() / label_w.cols()); }
  int label_dim() const { return static_cast<int>(label_w.cols()) - 1; }

  template <class Self, class F>
  static void visit(Self& self, const std::string& prefix, F&& f) {
    f(prefix + "root", self.root);
    f(prefix + "pos_embedding", self.pos_embedding);
    f(prefix + "arc_dep.w", self.arc_dep_w);
    f(prefix + "arc_dep.b", self.arc_dep_b);
    f(prefix + "arc_head.w", self.arc_head_w);
    f(prefix + "arc_head.b", self.arc_head_b);
    f(prefix + "label_dep.w", self.label_dep_w);
    f(prefix + "label_dep.b", self.label_dep_b);
    f(prefix + "label_head.w", self.label_head_w);
    f(prefix + "label_head.b", self.label_head_b);
    f(prefix + "arc_w", self.arc_w);
    f(prefix + "label_w", self.label_w);
  }
};

// Mean of each token's character rows, with `root` prepended as row 0.
// char_features excludes the corpus-tag row. Throws SpanMismatch.
Matrix pool_tokens(const Matrix& char_features, const Segmentation& seg, const Matrix& root);
// Gradient of pool_tokens: returns dLoss/dchar_features and adds row 0 to d_root.
Matrix pool_tokens_backward(const Matrix& d_tokens, const Segmentation& seg, Matrix& d_root);

// tokens.row(i) += table.row(pos_ids[i-1]) for i >= 1. Throws UnknownPosLabel.
Matrix add_pos(const Matrix& tokens, std::span<const int> pos_ids, const Matrix& table);

// [dep 1] * w * head^T.
Matrix biaffine_arc(const Matrix& dep, const Matrix& head, const Matrix& w);

// arc(i, j) scores token j as head of token i. The diagonal and row 0 (ROOT
// as dependent) are -inf.
Matrix score_arcs(const BiaffineParams& params, const Matrix& tokens);
// Relation scores for each dependent i = 1..n under heads[i-1]: n x |rels|.
Matrix score_labels(const BiaffineParams& params, const Matrix& tokens, std::span<const int> heads);

// All scores needed for training and decoding: arc plus one (n+1) x (n+1)
// matrix per relation, labels[r](i, j) = score of relation r for i <- j.
struct ParseScores {
  Matrix arc;
  std::vector<Matrix> labels;
};

struct BiaffineCache {
  Matrix tokens, arc_dep, arc_head, label_dep, label_head;
};

ParseScores score_parse(const BiaffineParams& params, const Matrix& tokens,
                        BiaffineCache* cache = nullptr);

// Sum over dependents of head cross-entropy plus relation cross-entropy at
// the gold head. Throws InvalidGoldTree. When grads is non-null it receives
// dLoss/dscores (label gradients nonzero only at gold heads).
double parse_loss(const ParseScores& scores, std::span<const int> gold_heads,
                  std::span<const int> gold_rels, ParseScores* grads = nullptr);

// Accumulates parameter gradients (excluding pos_embedding and root) and
// returns dLoss/dtokens.
Matrix score_parse_backward(const BiaffineParams& params, const BiaffineCache& cache,
                            const ParseScores& grads, BiaffineParams& param_grads);

struct DecodedTree {
  std::vector<int> heads;  // 1-based, 0 = ROOT
  std::vector<int> rels;
  double score = 0.0;      // sum of arc scores
};

// Maximum spanning arborescence over arc scores (Chu-Liu/Edmonds) with
// exactly one child of ROOT; relation = argmax label at the chosen head.
DecodedTree decode_tree(const Matrix& arc_scores, const std::vector<Matrix>& label_scores);

// Unconstrained maximum arborescence rooted at node 0 (may give ROOT several
// children). heads[0] is -1.
std::vector<int> chu_liu_edmonds(const Matrix& scores);

}  // namespace hanforge

#endif  // HANFORGE_BIAFFINE_HPP_
