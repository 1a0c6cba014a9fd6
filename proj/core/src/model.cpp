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

#include "hanforge/model.hpp"

#include <algorithm>

#include "hanforge/error.hpp"

namespace hanforge {

namespace {

void sort_unique(std::vector<std::string>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

ModelParams ModelParams::zeros_like() const {
  ModelParams z = *this;
  visit(z, [](const std::string&, Matrix& m) { m.setZero(); });
  return z;
}

const CrfHead* ModelParams::crf_head(Task task) const {
  switch (task) {
    case Task::kCws: return cws ? &*cws : nullptr;
    case Task::kPos: return pos ? &*pos : nullptr;
    case Task::kNer: return ner ? &*ner : nullptr;
    case Task::kDep: return nullptr;
  }
  return nullptr;
}

CrfHead* ModelParams::crf_head(Task task) {
  return const_cast<CrfHead*>(std::as_const(*this).crf_head(task));
}

Model Model::create(const ModelConfig& config, Vocabulary vocab,
                    std::vector<std::string> pos_categories,
                    std::vector<std::string> ner_categories, std::vector<std::string> relations,
                    Rng& rng) {
  Model m;
  m.config = config;
  m.config.encoder.vocab_size = vocab.size();
  m.config.encoder.validate();
  m.vocab = std::move(vocab);
  sort_unique(pos_categories);
  sort_unique(ner_categories);
  sort_unique(relations);

  auto has = [&](Task t) { return m.vocab.default_tag(t) != nullptr; };
  if (has(Task::kDep) && !has(Task::kPos)) {
    throw Error(ErrorCode::kConfigError, "dependency parsing needs a POS corpus tag");
  }
  if ((has(Task::kPos) || has(Task::kDep)) && pos_categories.empty()) {
    throw Error(ErrorCode::kConfigError, "no POS categories found");
  }
  if (has(Task::kNer) && ner_categories.empty()) {
    throw Error(ErrorCode::kConfigError, "no entity categories found");
  }
  if (has(Task::kDep) && relations.empty()) {
    throw Error(ErrorCode::kConfigError, "no dependency relations found");
  }

  m.cws_scheme = LabelScheme::cws();
  m.pos_scheme = LabelScheme::pos(pos_categories);
  m.ner_scheme = LabelScheme::ner(ner_categories);
  m.relations = std::move(relations);

  const int d = m.config.encoder.hidden;
  m.params.encoder = EncoderParams::init(m.config.encoder, rng);
  if (has(Task::kCws)) m.params.cws = CrfHead::init(d, 4, rng);
  if (has(Task::kPos)) {
    m.params.pos = CrfHead::init(d, static_cast<int>(m.pos_scheme.size()), rng);
  }
  if (has(Task::kNer)) {
    m.params.ner = CrfHead::init(d, static_cast<int>(m.ner_scheme.size()), rng);
  }
  if (has(Task::kDep)) {
    m.params.dep = BiaffineParams::init(d, m.config.biaffine,
                                        static_cast<int>(m.pos_scheme.categories().size()),
                                        static_cast<int>(m.relations.size()), rng);
  }
  return m;
}

bool Model::has_task(Task task) const {
  if (task == Task::kDep) return params.dep.has_value();
  return params.crf_head(task) != nullptr;
}

const LabelScheme& Model::scheme(Task task) const {
  switch (task) {
    case Task::kCws: return cws_scheme;
    case Task::kPos: return pos_scheme;
    case Task::kNer: return ner_scheme;
    case Task::kDep: break;
  }
  throw Error(ErrorCode::kConfigError, "dependency parsing has no label scheme");
}

int Model::pos_category_id(const std::string& category) const {
  const auto& cats = pos_scheme.categories();
  auto it = std::lower_bound(cats.begin(), cats.end(), category);
  return (it != cats.end() && *it == category) ? static_cast<int>(it - cats.begin()) : -1;
}

int Model::relation_id(const std::string& relation) const {
  auto it = std::lower_bound(relations.begin(), relations.end(), relation);
  return (it != relations.end() && *it == relation) ? static_cast<int>(it - relations.begin()) : -1;
}

}  // namespace hanforge
