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

#include "hanforge/trainer.hpp"

#include <algorithm>
#include <cmath>

#include "hanforge/error.hpp"

namespace hanforge {

namespace {

std::vector<Matrix*> tensors(ModelParams& p) {
  std::vector<Matrix*> out;
  ModelParams::visit(p, [&](const std::string&, Matrix& m) { out.push_back(&m); });
  return out;
}

std::vector<const Matrix*> tensors(const ModelParams& p) {
  std::vector<const Matrix*> out;
  ModelParams::visit(p, [&](const std::string&, const Matrix& m) { out.push_back(&m); });
  return out;
}

void add_transitions(Transitions& into, const Transitions& g) {
  into.trans += g.trans;
  into.start += g.start;
  into.end += g.end;
}

}  // namespace

Adam::Adam(const ModelParams& shape, const OptimizerConfig& config) : config_(config) {
  for (const Matrix* m : tensors(shape)) {
    first_.push_back(Matrix::Zero(m->rows(), m->cols()));
    second_.push_back(Matrix::Zero(m->rows(), m->cols()));
  }
}

void Adam::step(ModelParams& params, const ModelParams& grads) {
  auto p = tensors(params);
  auto g = tensors(grads);
  if (p.size() != first_.size() || g.size() != first_.size()) {
    throw Error(ErrorCode::kConfigError, "optimizer state does not match parameters");
  }
  double norm_sq = 0.0;
  for (const Matrix* m : g) norm_sq += m->squaredNorm();
  const double norm = std::sqrt(norm_sq);
  const double scale = (config_.clip_norm > 0.0 && norm > config_.clip_norm)
                           ? config_.clip_norm / norm
                           : 1.0;
  ++steps_;
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(steps_));
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto gi = g[i]->array() * scale;
    first_[i].array() = config_.beta1 * first_[i].array() + (1.0 - config_.beta1) * gi;
    second_[i].array() = config_.beta2 * second_[i].array() + (1.0 - config_.beta2) * gi.square();
    p[i]->array() -= config_.learning_rate * (first_[i].array() / c1) /
                     ((second_[i].array() / c2).sqrt() + config_.epsilon);
    round_to_storage(*p[i]);
  }
}

double sentence_loss(const Model& model, const Sentence& sentence, const CorpusTag& tag,
                     ModelParams* grads, const LayerPlan* plan) {
  const auto ids = model.vocab.encode(sentence.chars);
  const Eigen::Index T = static_cast<Eigen::Index>(ids.size());
  if (T == 0) throw Error(ErrorCode::kEmptyInput, "empty training sentence");
  EncoderCache cache;
  EncoderCache* cache_ptr = grads ? &cache : nullptr;
  const Matrix features =
      plan ? encoder_forward(model.params.encoder, plan->layers, tag.vocab_id, ids, {}, cache_ptr)
           : encoder_forward(model.params.encoder, tag.vocab_id, ids, {}, cache_ptr);
  const Matrix char_features = features.bottomRows(T);

  double loss = 0.0;
  Matrix d_chars;
  if (tag.task == Task::kDep) {
    if (!model.params.dep) throw Error(ErrorCode::kConfigError, "model has no parser head");
    const BiaffineParams& dep = *model.params.dep;
    std::vector<int> pos_ids, rel_ids;
    for (const auto& p : sentence.pos_tags) {
      pos_ids.push_back(model.pos_category_id(p));
      if (pos_ids.back() < 0) throw Error(ErrorCode::kUnknownPosLabel, "POS tag '" + p + "'");
    }
    for (const auto& r : sentence.rels) {
      rel_ids.push_back(model.relation_id(r));
      if (rel_ids.back() < 0) throw Error(ErrorCode::kLabelOutOfRange, "relation '" + r + "'");
    }
    const Matrix tokens =
        add_pos(pool_tokens(char_features, sentence.segmentation, dep.root), pos_ids,
                dep.pos_embedding);
    BiaffineCache bc;
    const ParseScores scores = score_parse(dep, tokens, &bc);
    ParseScores score_grads;
    loss = parse_loss(scores, sentence.heads, rel_ids, grads ? &score_grads : nullptr);
    if (!grads) return loss;
    BiaffineParams& dg = *grads->dep;
    const Matrix d_tokens = score_parse_backward(dep, bc, score_grads, dg);
    for (std::size_t i = 0; i < pos_ids.size(); ++i) {
      dg.pos_embedding.row(pos_ids[i]) += d_tokens.row(i + 1);
    }
    d_chars = pool_tokens_backward(d_tokens, sentence.segmentation, dg.root);
  } else {
    const CrfHead* head = model.params.crf_head(tag.task);
    if (!head) {
      throw Error(ErrorCode::kConfigError,
                  "model has no " + std::string(task_name(tag.task)) + " head");
    }
    const LabelScheme& scheme = model.scheme(tag.task);
    std::vector<int> gold;
    gold.reserve(sentence.labels.size());
    for (const auto& l : sentence.labels) {
      auto idx = scheme.index_of(l);
      if (!idx) throw Error(ErrorCode::kLabelOutOfRange, "label '" + l + "' not in scheme");
      gold.push_back(static_cast<int>(*idx));
    }
    CrfHeadCache hc;
    const Matrix em = crf_emissions(*head, char_features, &hc);
    if (!grads) return nll_loss(em, head->transitions, gold, T);
    CrfGradients cg{{}, Transitions::zeros(head->num_labels())};
    loss = nll_loss(em, head->transitions, gold, T, &cg);
    CrfHead& hg = *grads->crf_head(tag.task);
    add_transitions(hg.transitions, cg.transitions);
    d_chars = crf_emissions_backward(*head, hc, cg.emissions, hg);
  }

  Matrix upstream = Matrix::Zero(T + 1, features.cols());
  upstream.bottomRows(T) = d_chars;
  if (plan) {
    std::vector<EncoderLayer*> layer_grads;
    for (int owner : plan->owner) {
      layer_grads.push_back(owner >= 0 ? &grads->encoder.layers.at(owner) : nullptr);
    }
    encoder_backward(model.params.encoder, plan->layers, cache, upstream, grads->encoder,
                     layer_grads);
  } else {
    encoder_backward(model.params.encoder, cache, upstream, grads->encoder);
  }
  return loss;
}

double mean_loss(const Model& model, std::span<const ExampleRef> examples) {
  if (examples.empty()) return 0.0;
  double total = 0.0;
  for (const auto& ex : examples) total += sentence_loss(model, *ex.sentence, *ex.tag);
  return total / static_cast<double>(examples.size());
}

BatchSampler::BatchSampler(std::vector<TrainingSet> sets, std::size_t batch_size,
                           std::uint64_t seed)
    : sets_(std::move(sets)), batch_size_(std::max<std::size_t>(1, batch_size)), rng_(seed) {
  std::erase_if(sets_, [](const TrainingSet& s) { return s.indices.empty(); });
  if (sets_.empty()) throw Error(ErrorCode::kConfigError, "no training sentences");
  cursors_.resize(sets_.size());
  for (std::size_t i = 0; i < sets_.size(); ++i) {
    total_ += sets_[i].indices.size();
    reshuffle(i);
  }
}

std::size_t BatchSampler::batches_per_epoch() const {
  return (total_ + batch_size_ - 1) / batch_size_;
}

void BatchSampler::reshuffle(std::size_t set) {
  Cursor& c = cursors_[set];
  c.order = sets_[set].indices;
  // Fisher-Yates with our own uniform draw for portability.
  for (std::size_t i = c.order.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform01(rng_) * static_cast<double>(i));
    std::swap(c.order[i - 1], c.order[std::min(j, i - 1)]);
  }
  c.pos = 0;
}

std::vector<ExampleRef> BatchSampler::next() {
  const double pick = uniform01(rng_) * static_cast<double>(total_);
  std::size_t set = 0;
  double acc = 0.0;
  for (; set + 1 < sets_.size(); ++set) {
    acc += static_cast<double>(sets_[set].indices.size());
    if (pick < acc) break;
  }
  std::vector<ExampleRef> batch;
  const std::size_t n = std::min(batch_size_, sets_[set].indices.size());
  for (std::size_t k = 0; k < n; ++k) {
    Cursor& c = cursors_[set];
    if (c.pos == c.order.size()) reshuffle(set);
    batch.push_back({&sets_[set].corpus->sentences[c.order[c.pos++]], sets_[set].tag});
  }
  return batch;
}

Trainer::Trainer(Model& model, const OptimizerConfig& config)
    : model_(model), adam_(model.params, config) {}

double Trainer::step(std::span<const ExampleRef> batch, const LayerPlan* plan) {
  if (batch.empty()) return 0.0;
  ModelParams grads = model_.params.zeros_like();
  double total = 0.0;
  for (const auto& ex : batch) total += sentence_loss(model_, *ex.sentence, *ex.tag, &grads, plan);
  const double inv = 1.0 / static_cast<double>(batch.size());
  ModelParams::visit(grads, [inv](const std::string&, Matrix& m) { m *= inv; });
  adam_.step(model_.params, grads);
  return total * inv;
}

}  // namespace hanforge
