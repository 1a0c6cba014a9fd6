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

#ifndef HANFORGE_PIPELINE_HPP_
#define HANFORGE_PIPELINE_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hanforge/corpus.hpp"
#include "hanforge/lexicon.hpp"
#include "hanforge/model.hpp"

namespace hanforge {

inline constexpr std::size_t kMaxSentenceChars = 254;

// Sentences converted to id rows: the corpus tag id at column 0, then one id
// per character, right-padded with PAD to the longest sentence.
struct Batch {
  int tag_id = 0;
  std::vector<std::vector<int>> ids;
  std::vector<std::vector<std::uint8_t>> mask;  // 1 for the tag slot and real characters
  std::vector<std::size_t> lengths;             // characters per sentence
  std::vector<std::vector<std::string>> chars;
};

// Throws EmptyInput for an empty list or an empty sentence, LengthExceeded
// above max_chars characters. Text is used verbatim.
Batch preprocess(std::span<const std::string> sentences, const CorpusTag& tag,
                 const Vocabulary& vocab, std::size_t max_chars = kMaxSentenceChars);

struct PosToken {
  std::string word;
  std::string tag;
  friend bool operator==(const PosToken&, const PosToken&) = default;
};

struct NamedEntity {
  std::string text;
  std::string category;
  Span span;
  friend bool operator==(const NamedEntity&, const NamedEntity&) = default;
};

struct DepRow {
  std::string word;
  int head = 0;  // 1-based, 0 = ROOT
  std::string relation;
  std::string pos;
  friend bool operator==(const DepRow&, const DepRow&) = default;
};

// Result for one sentence; only the member matching `task` is filled.
struct SentenceAnalysis {
  Task task = Task::kCws;
  std::vector<std::string> words;
  std::vector<PosToken> pos;
  std::vector<NamedEntity> entities;
  std::vector<DepRow> dependencies;
  friend bool operator==(const SentenceAnalysis&, const SentenceAnalysis&) = default;
};

using AnalysisResult = std::vector<SentenceAnalysis>;

struct PredictOptions {
  // Corpus tag name per task (indexed by Task); empty = the task's first tag.
  std::array<std::string, 4> tags;
  // Biases CWS and POS decoding (and therefore DEP segmentation).
  const Lexicon* lexicon = nullptr;

  const std::string& tag(Task t) const { return tags[static_cast<int>(t)]; }
  void set_tag(Task t, std::string name) { tags[static_cast<int>(t)] = std::move(name); }
};

// CWS, POS, NER: one encoder pass under the task's tag, constrained Viterbi,
// then label decoding. DEP: a POS pass fixes segmentation and POS tags, a
// second pass under the DEP tag feeds the biaffine parser.
AnalysisResult predict(const Model& model, std::span<const std::string> sentences, Task task,
                       const PredictOptions& options = {});

// Stateful front end over a shared, immutable model.
class Analyzer {
 public:
  explicit Analyzer(std::shared_ptr<const Model> model);

  // Throws UnknownTag if the name is not a registered CWS corpus tag.
  void set_cws_style(std::string_view tag_name);
  std::string cws_style() const;

  void add_user_dict(std::string_view word) { lexicon_.add_word(word); }
  void add_user_dict(std::span<const std::string> words);
  void set_user_dict_weight(double w) { lexicon_.set_weight(w); }
  void clear_user_dict() { lexicon_ = Lexicon(); }
  const Lexicon& user_dict() const { return lexicon_; }

  // Throws ModelNotLoaded, EmptyInput.
  AnalysisResult analyze(std::span<const std::string> sentences, Task task) const;
  SentenceAnalysis analyze(std::string_view sentence, Task task) const;

 private:
  std::shared_ptr<const Model> model_;
  PredictOptions options_;
  Lexicon lexicon_;
};

struct CorpusSpec {
  std::string path;
  std::string tag;
  Task task = Task::kCws;
};

struct TrainingConfig {
  std::vector<CorpusSpec> corpora;
  ModelConfig model;
  int epochs = 10;
  std::size_t batch_size = 16;
  double learning_rate = 1e-3;
  double clip_norm = 5.0;
  std::uint64_t seed = 1;
  double eval_fraction = 0.1;

  // Throws ConfigError.
  void validate() const;
  // JSON; relative corpus paths resolve against `base_dir`.
  static TrainingConfig parse(std::string_view json_text, const std::string& base_dir = "");
  static TrainingConfig load(const std::string& path);
};

// Corpora loaded from a config, each split into train and held-out indices
// by a seeded shuffle.
struct DataSplit {
  std::vector<Corpus> corpora;
  std::vector<std::vector<std::size_t>> train;
  std::vector<std::vector<std::size_t>> heldout;
};

DataSplit load_and_split(const TrainingConfig& config);

struct CorpusMetrics {
  std::string tag;
  Task task = Task::kCws;
  std::size_t sentences = 0;
  double f1 = 0.0;   // span F for CWS/POS/NER
  double uas = 0.0;  // DEP only
  double las = 0.0;  // DEP only
  double primary() const { return task == Task::kDep ? uas : f1; }
};

struct EpochReport {
  int epoch = 0;
  double train_loss = 0.0;
  std::vector<CorpusMetrics> heldout;
};

using EpochCallback = std::function<void(const EpochReport&)>;

// Scores predictions on `indices` of the corpus (all sentences if empty).
CorpusMetrics evaluate(const Model& model, const Corpus& corpus, std::span<const std::size_t> indices,
                       const std::string& tag, const Lexicon* lexicon = nullptr);

// Builds the vocabulary and label inventories from the data, initializes a
// model and trains all corpora jointly.
Model train(const TrainingConfig& config, const EpochCallback& on_epoch = {});
Model train(const TrainingConfig& config, const DataSplit& data, const EpochCallback& on_epoch = {});

struct FinetuneOptions {
  int epochs = 5;
  std::size_t batch_size = 16;
  double learning_rate = 1e-3;
  double clip_norm = 5.0;
  std::uint64_t seed = 1;
};

// Continues training on one corpus under an existing tag. The report's
// train_loss is the mean loss over the whole corpus after each epoch.
void finetune(Model& model, const Corpus& data, const std::string& tag,
              const FinetuneOptions& options, const EpochCallback& on_epoch = {});

}  // namespace hanforge

#endif  // HANFORGE_PIPELINE_HPP_
