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

#ifndef HANFORGE_MODEL_HPP_
#define HANFORGE_MODEL_HPP_

#include <optional>
#include <string>
#include <vector>

#include "hanforge/biaffine.hpp"
#include "hanforge/crf.hpp"
#include "hanforge/encoder.hpp"
#include "hanforge/labels.hpp"
#include "hanforge/vocabulary.hpp"

namespace hanforge {

struct ModelConfig {
  EncoderConfig encoder;
  BiaffineConfig biaffine;
  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

// All trainable tensors: the shared encoder plus one head per task. A head is
// absent when no corpus of that task was registered.
struct ModelParams {
  EncoderParams encoder;
  std::optional<CrfHead> cws, pos, ner;
  std::optional<BiaffineParams> dep;

  ModelParams zeros_like() const;
  const CrfHead* crf_head(Task task) const;
  CrfHead* crf_head(Task task);

  template <class Self, class F>
  static void visit(Self& self, F&& f) {
    EncoderParams::visit(self.encoder, "encoder.", f);
    if (self.cws) CrfHead::visit(*self.cws, "cws.", f);
    if (self.pos) CrfHead::visit(*self.pos, "pos.", f);
    if (self.ner) CrfHead::visit(*self.ner, "ner.", f);
    if (self.dep) BiaffineParams::visit(*self.dep, "dep.", f);
  }
};

// Everything needed to run inference: vocabulary and corpus tags, label
// inventories and parameters.
struct Model {
  ModelConfig config;
  Vocabulary vocab;
  LabelScheme cws_scheme;
  LabelScheme pos_scheme;
  LabelScheme ner_scheme;
  std::vector<std::string> relations;  // sorted
  ModelParams params;

  // Builds heads for every task that has a registered corpus tag and
  // initializes all parameters from `rng`.
  static Model create(const ModelConfig& config, Vocabulary vocab,
                      std::vector<std::string> pos_categories,
                      std::vector<std::string> ner_categories, std::vector<std::string> relations,
                      Rng& rng);

  bool has_task(Task task) const;
  // Scheme for CWS, POS or NER.
  const LabelScheme& scheme(Task task) const;
  // Index of a POS category in the POS embedding table, or -1.
  int pos_category_id(const std::string& category) const;
  int relation_id(const std::string& relation) const;
};

}  // namespace hanforge

#endif  // HANFORGE_MODEL_HPP_
