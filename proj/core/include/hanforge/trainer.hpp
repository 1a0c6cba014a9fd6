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

#ifndef HANFORGE_TRAINER_HPP_
#define HANFORGE_TRAINER_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hanforge/corpus.hpp"
#include "hanforge/model.hpp"

namespace hanforge {

struct OptimizerConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double clip_norm = 5.0;
};

// Adaptive-moment optimizer over every tensor of a ModelParams, with global
// gradient-norm clipping. Updated values are rounded to storage precision.
class Adam {
 public:
  Adam(const ModelParams& shape, const OptimizerConfig& config);
  void step(ModelParams& params, const ModelParams& grads);

 private:
  OptimizerConfig config_;
  std::vector<Matrix> first_, second_;
  long steps_ = 0;
};

struct ExampleRef {
  const Sentence* sentence = nullptr;
  const CorpusTag* tag = nullptr;
};

// Replaces the model's own encoder blocks for one forward/backward pass.
// owner[i] is the index in params.encoder.layers that receives block i's
// gradient, or -1 if block i is frozen.
struct LayerPlan {
  std::vector<const EncoderLayer*> layers;
  std::vector<int> owner;
};

// Task loss for one sentence under its corpus tag: CRF negative
// log-likelihood for CWS/POS/NER, biaffine parse loss with gold POS labels
// for DEP. Accumulates gradients into `grads` when non-null.
double sentence_loss(const Model& model, const Sentence& sentence, const CorpusTag& tag,
                     ModelParams* grads = nullptr, const LayerPlan* plan = nullptr);

double mean_loss(const Model& model, std::span<const ExampleRef> examples);

struct TrainingSet {
  const Corpus* corpus = nullptr;
  const CorpusTag* tag = nullptr;
  std::vector<std::size_t> indices;  // sentences of `corpus` used for training
};

// Each batch comes from a single corpus, chosen with probability
// proportional to its training size. Within a corpus, sentences are visited
// in a reshuffled order each pass.
class BatchSampler {
 public:
  BatchSampler(std::vector<TrainingSet> sets, std::size_t batch_size, std::uint64_t seed);

  std::size_t batches_per_epoch() const;
  std::vector<ExampleRef> next();

 private:
  struct Cursor {
    std::vector<std::size_t> order;
    std::size_t pos = 0;
  };
  void reshuffle(std::size_t set);

  std::vector<TrainingSet> sets_;
  std::vector<Cursor> cursors_;
  std::size_t batch_size_;
  std::size_t total_ = 0;
  Rng rng_;
};

class Trainer {
 public:
  Trainer(Model& model, const OptimizerConfig& config);

  // One optimizer update on the batch-mean loss. Returns that mean loss.
  double step(std::span<const ExampleRef> batch, const LayerPlan* plan = nullptr);

 private:
  Model& model_;
  Adam adam_;
};

}  // namespace hanforge

#endif  // HANFORGE_TRAINER_HPP_
