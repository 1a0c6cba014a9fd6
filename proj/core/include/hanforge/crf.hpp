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

#ifndef HANFORGE_CRF_HPP_
#define HANFORGE_CRF_HPP_

#include <span>
#include <string>
#include <vector>

#include "hanforge/labels.hpp"
#include "hanforge/tensor.hpp"

namespace hanforge {

// Label-pair scores plus boundary scores, indexed in scheme label order.
struct Transitions {
  Matrix trans;  // L x L, trans(i, j) scores label i followed by label j
  Matrix start;  // 1 x L
  Matrix end;    // 1 x L

  static Transitions zeros(int num_labels);
  int num_labels() const { return static_cast<int>(trans.rows()); }

  template <class Self, class F>
  static void visit(Self& self, const std::string& prefix, F&& f) {
    f(prefix + "trans", self.trans);
    f(prefix + "start", self.start);
    f(prefix + "end", self.end);
  }
};

// Hard legality mask used at decode time.
struct TransitionMask {
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> allowed;
  Eigen::Array<bool, Eigen::Dynamic, 1> start_ok;
  Eigen::Array<bool, Eigen::Dynamic, 1> end_ok;

  static TransitionMask from_scheme(const LabelScheme& scheme);
};

// Sum of start, emission, transition and end scores along `labels`.
double path_score(const Matrix& emissions, const Transitions& tr, std::span<const int> labels);

// log sum over all label sequences of length `len` of exp(path score), by the
// forward recursion. Throws EmptySequence when len == 0.
double log_partition(const Matrix& emissions, const Transitions& tr, std::size_t len);

struct CrfGradients {
  Matrix emissions;  // T x L; rows at or past `len` are zero
  Transitions transitions;
};

// -log P(gold | emissions) over the first `len` positions. When `grads` is
// non-null, grads->emissions is overwritten and grads->transitions is
// accumulated into (it must be sized L x L). Throws LabelOutOfRange.
double nll_loss(const Matrix& emissions, const Transitions& tr, std::span<const int> gold,
                std::size_t len, CrfGradients* grads = nullptr);

// Per-position label marginals (len x L).
Matrix label_marginals(const Matrix& emissions, const Transitions& tr, std::size_t len);

struct ViterbiResult {
  std::vector<int> labels;
  double score = 0.0;
};

// Highest-scoring label path. `bias`, when given, is added to the emissions
// before decoding and counts toward the returned score. Ties resolve to the
// lowest label index at each backtrack step. Throws NoLegalPath when the mask
// leaves no finite path.
ViterbiResult viterbi(const Matrix& emissions, const Transitions& tr,
                      const TransitionMask* mask = nullptr, const Matrix* bias = nullptr);

// MLP projection from encoder features to per-label emission scores,
// followed by a linear-chain CRF over the scheme's labels.
struct CrfHead {
  Matrix w1, b1;  // d x d, 1 x d
  Matrix w2, b2;  // d x L, 1 x L
  Transitions transitions;

  static CrfHead init(int hidden, int num_labels, Rng& rng);
  CrfHead zeros_like() const;
  int num_labels() const { return static_cast<int>(w2.cols()); }

  template <class Self, class F>
  static void visit(Self& self, const std::string& prefix, F&& f) {
    f(prefix + "mlp.w1", self.w1);
    f(prefix + "mlp.b1", self.b1);
    f(prefix + "mlp.w2", self.w2);
    f(prefix + "mlp.b2", self.b2);
    Transitions::visit(self.transitions, prefix + "crf.", f);
  }
};

struct CrfHeadCache {
  Matrix input;
  Matrix hidden;
};

// features: T x d (character rows only). Returns T x L emissions.
Matrix crf_emissions(const CrfHead& head, const Matrix& features, CrfHeadCache* cache = nullptr);

// Accumulates head parameter gradients; returns dLoss/dfeatures.
Matrix crf_emissions_backward(const CrfHead& head, const CrfHeadCache& cache,
                              const Matrix& d_emissions, CrfHead& grads);

}  // namespace hanforge

#endif  // HANFORGE_CRF_HPP_
