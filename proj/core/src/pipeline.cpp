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

#include "hanforge/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hanforge/convert.hpp"
#include "hanforge/error.hpp"
#include "hanforge/metrics.hpp"
#include "hanforge/text.hpp"
#include "hanforge/trainer.hpp"

namespace hanforge {

namespace {

using json = nlohmann::json;

// Full structured output of one sentence, before flattening for display.
struct Decoded {
  Segmentation segmentation;
  std::vector<std::string> tags;
  std::vector<Entity> entities;
  std::vector<int> heads;
  std::vector<std::string> rels;
};

const CorpusTag& resolve_tag(const Model& model, Task task, const std::string& name) {
  if (!name.empty()) {
    const CorpusTag& tag = model.vocab.tag(name);
    if (tag.task != task) {
      throw Error(ErrorCode::kUnknownTag,
                  "tag '" + name + "' is not a " + std::string(task_name(task)) + " tag");
    }
    return tag;
  }
  const CorpusTag* tag = model.vocab.default_tag(task);
  if (!tag) {
    throw Error(ErrorCode::kUnknownTag,
                "model has no " + std::string(task_name(task)) + " corpus tag");
  }
  return *tag;
}

std::vector<std::string> crf_decode(const Model& model, Task task, const CorpusTag& tag,
                                    std::span<const std::string> chars, std::span<const int> ids,
                                    const Lexicon* lexicon) {
  const CrfHead* head = model.params.crf_head(task);
  if (!head) {
    throw Error(ErrorCode::kModelNotLoaded,
                "model has no " + std::string(task_name(task)) + " head");
  }
  const auto T = static_cast<Eigen::Index>(ids.size());
  const Matrix features = encoder_forward(model.params.encoder, tag.vocab_id, ids);
  const Matrix em = crf_emissions(*head, features.bottomRows(T));
  const LabelScheme& scheme = model.scheme(task);
  const TransitionMask mask = TransitionMask::from_scheme(scheme);
  ViterbiResult best;
  if (lexicon && lexicon->size() > 0 && task != Task::kNer) {
    const auto skeleton = max_match(chars, *lexicon);
    const Matrix bias = bias_matrix(compute_bias(em, skeleton, lexicon->weight()), scheme);
    best = viterbi(em, head->transitions, &mask, &bias);
  } else {
    best = viterbi(em, head->transitions, &mask);
  }
  std::vector<std::string> labels;
  labels.reserve(best.labels.size());
  for (int l : best.labels) labels.push_back(scheme.label(static_cast<std::size_t>(l)));
  return labels;
}

Decoded decode_one(const Model& model, Task task, std::span<const std::string> chars,
                   std::span<const int> ids, const PredictOptions& options) {
  Decoded out;
  switch (task) {
    case Task::kCws: {
      const auto labels = crf_decode(model, task, resolve_tag(model, task, options.tag(task)),
                                     chars, ids, options.lexicon);
      out.segmentation = decode_bmes(chars, labels);
      return out;
    }
    case Task::kPos: {
      const auto labels = crf_decode(model, task, resolve_tag(model, task, options.tag(task)),
                                     chars, ids, options.lexicon);
      TaggedTokens tt = decode_cross(chars, labels);
      out.segmentation = std::move(tt.segmentation);
      out.tags = std::move(tt.tags);
      return out;
    }
    case Task::kNer: {
      const auto labels = crf_decode(model, task, resolve_tag(model, task, options.tag(task)),
                                     chars, ids, options.lexicon);
      out.segmentation = Segmentation::from_tokens(chars);
      out.entities = decode_ner(chars, labels);
      return out;
    }
    case Task::kDep: {
      if (!model.params.dep) throw Error(ErrorCode::kModelNotLoaded, "model has no parser head");
      const CorpusTag& dep_tag = resolve_tag(model, Task::kDep, options.tag(Task::kDep));
      out = decode_one(model, Task::kPos, chars, ids, options);
      const BiaffineParams& dep = *model.params.dep;
      std::vector<int> pos_ids;
      for (const auto& t : out.tags) pos_ids.push_back(model.pos_category_id(t));
      const auto T = static_cast<Eigen::Index>(ids.size());
      const Matrix features = encoder_forward(model.params.encoder, dep_tag.vocab_id, ids);
      const Matrix tokens = add_pos(
          pool_tokens(features.bottomRows(T), out.segmentation, dep.root), pos_ids,
          dep.pos_embedding);
      const ParseScores scores = score_parse(dep, tokens);
      const DecodedTree tree = decode_tree(scores.arc, scores.labels);
      out.heads = tree.heads;
      for (int r : tree.rels) out.rels.push_back(model.relations.at(static_cast<std::size_t>(r)));
      return out;
    }
  }
  return out;
}

SentenceAnalysis flatten(Task task, const Decoded& d) {
  SentenceAnalysis a;
  a.task = task;
  const auto& chars = d.segmentation.chars();
  switch (task) {
    case Task::kCws:
      a.words = d.segmentation.tokens();
      break;
    case Task::kPos:
      for (std::size_t i = 0; i < d.segmentation.size(); ++i) {
        a.pos.push_back({d.segmentation.token(i), d.tags[i]});
      }
      break;
    case Task::kNer:
      for (const auto& e : d.entities) {
        a.entities.push_back({join_chars(chars, e.span.begin, e.span.end), e.category, e.span});
      }
      break;
    case Task::kDep:
      for (std::size_t i = 0; i < d.segmentation.size(); ++i) {
        a.dependencies.push_back({d.segmentation.token(i), d.heads[i], d.rels[i], d.tags[i]});
      }
      break;
  }
  return a;
}

void shuffle(std::vector<std::size_t>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i));
    std::swap(v[i - 1], v[std::min(j, i - 1)]);
  }
}

std::vector<std::size_t> all_indices(const Corpus& c) {
  std::vector<std::size_t> v(c.sentences.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = i;
  return v;
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  return j.at(key).get<T>();
}

}  // namespace

Batch preprocess(std::span<const std::string> sentences, const CorpusTag& tag,
                 const Vocabulary& vocab, std::size_t max_chars) {
  if (sentences.empty()) throw Error(ErrorCode::kEmptyInput, "no sentences");
  Batch b;
  b.tag_id = tag.vocab_id;
  std::size_t width = 0;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    auto chars = split_chars(sentences[i]);
    if (chars.empty()) {
      throw Error(ErrorCode::kEmptyInput, "sentence " + std::to_string(i) + " is empty");
    }
    if (chars.size() > max_chars) {
      throw Error(ErrorCode::kLengthExceeded, "sentence " + std::to_string(i) + " has " +
                                                  std::to_string(chars.size()) +
                                                  " characters, limit is " +
                                                  std::to_string(max_chars));
    }
    width = std::max(width, chars.size() + 1);
    b.lengths.push_back(chars.size());
    b.chars.push_back(std::move(chars));
  }
  for (const auto& chars : b.chars) {
    std::vector<int> row(width, Vocabulary::kPad);
    std::vector<std::uint8_t> mask(width, 0);
    row[0] = tag.vocab_id;
    mask[0] = 1;
    const auto ids = vocab.encode(chars);
    for (std::size_t t = 0; t < ids.size(); ++t) {
      row[t + 1] = ids[t];
      mask[t + 1] = 1;
    }
    b.ids.push_back(std::move(row));
    b.mask.push_back(std::move(mask));
  }
  return b;
}

AnalysisResult predict(const Model& model, std::span<const std::string> sentences, Task task,
                       const PredictOptions& options) {
  if (model.vocab.size() <= 2 || model.params.encoder.layers.empty()) {
    throw Error(ErrorCode::kModelNotLoaded, "model is empty");
  }
  // The batch tag only drives id conversion here; decode_one picks each
  // pass's tag itself.
  const Task first_pass = task == Task::kDep ? Task::kPos : task;
  const Batch batch =
      preprocess(sentences, resolve_tag(model, first_pass, options.tag(first_pass)), model.vocab,
                 std::min<std::size_t>(kMaxSentenceChars,
                                       static_cast<std::size_t>(model.config.encoder.max_len - 1)));
  AnalysisResult out;
  out.reserve(sentences.size());
  for (std::size_t i = 0; i < batch.ids.size(); ++i) {
    std::span<const int> ids(batch.ids[i].data() + 1, batch.lengths[i]);
    out.push_back(flatten(task, decode_one(model, task, batch.chars[i], ids, options)));
  }
  return out;
}

Analyzer::Analyzer(std::shared_ptr<const Model> model) : model_(std::move(model)) {}

void Analyzer::set_cws_style(std::string_view tag_name) {
  if (!model_) throw Error(ErrorCode::kModelNotLoaded, "no model");
  const CorpusTag& tag = model_->vocab.tag(tag_name);
  if (tag.task != Task::kCws) {
    throw Error(ErrorCode::kUnknownTag, "'" + std::string(tag_name) + "' is not a CWS tag");
  }
  options_.set_tag(Task::kCws, tag.name);
}

std::string Analyzer::cws_style() const {
  if (!options_.tag(Task::kCws).empty() || !model_) return options_.tag(Task::kCws);
  const CorpusTag* tag = model_->vocab.default_tag(Task::kCws);
  return tag ? tag->name : std::string();
}

void Analyzer::add_user_dict(std::span<const std::string> words) {
  for (const auto& w : words) lexicon_.add_word(w);
}

AnalysisResult Analyzer::analyze(std::span<const std::string> sentences, Task task) const {
  if (!model_) throw Error(ErrorCode::kModelNotLoaded, "no model");
  PredictOptions opts = options_;
  opts.lexicon = lexicon_.size() > 0 ? &lexicon_ : nullptr;
  return predict(*model_, sentences, task, opts);
}

SentenceAnalysis Analyzer::analyze(std::string_view sentence, Task task) const {
  const std::string s(sentence);
  return analyze(std::span<const std::string>(&s, 1), task).front();
}

void TrainingConfig::validate() const {
  if (corpora.empty()) throw Error(ErrorCode::kConfigError, "no corpora configured");
  bool has_pos = false, has_dep = false;
  for (const auto& c : corpora) {
    if (c.path.empty() || c.tag.empty()) {
      throw Error(ErrorCode::kConfigError, "corpus entries need a path and a tag");
    }
    has_pos |= c.task == Task::kPos;
    has_dep |= c.task == Task::kDep;
  }
  if (has_dep && !has_pos) {
    throw Error(ErrorCode::kConfigError, "a DEP corpus requires a POS corpus for decoding");
  }
  if (epochs < 0) throw Error(ErrorCode::kConfigError, "epochs must be non-negative");
  if (batch_size == 0) throw Error(ErrorCode::kConfigError, "batch_size must be positive");
  if (!(learning_rate > 0.0)) throw Error(ErrorCode::kConfigError, "learning_rate must be positive");
  if (!(eval_fraction >= 0.0 && eval_fraction < 1.0)) {
    throw Error(ErrorCode::kConfigError, "eval_fraction must be in [0, 1)");
  }
  EncoderConfig enc = model.encoder;
  if (enc.vocab_size == 0) enc.vocab_size = 3;
  enc.validate();
  if (model.biaffine.arc_dim <= 0 || model.biaffine.label_dim <= 0) {
    throw Error(ErrorCode::kConfigError, "biaffine dimensions must be positive");
  }
}

TrainingConfig TrainingConfig::parse(std::string_view json_text, const std::string& base_dir) {
  TrainingConfig cfg;
  try {
    const json j = json::parse(json_text);
    for (const auto& c : j.at("corpora")) {
      CorpusSpec spec;
      spec.path = c.at("path").get<std::string>();
      spec.tag = c.at("tag").get<std::string>();
      const auto task_str = c.at("task").get<std::string>();
      const auto task = parse_task(task_str);
      if (!task) throw Error(ErrorCode::kConfigError, "unknown task '" + task_str + "'");
      spec.task = *task;
      if (!base_dir.empty() && std::filesystem::path(spec.path).is_relative()) {
        spec.path = (std::filesystem::path(base_dir) / spec.path).lexically_normal().string();
      }
      cfg.corpora.push_back(std::move(spec));
    }
    if (j.contains("model")) {
      const json& m = j.at("model");
      EncoderConfig& e = cfg.model.encoder;
      e.num_layers = get_or(m, "layers", e.num_layers);
      e.hidden = get_or(m, "hidden", e.hidden);
      e.num_heads = get_or(m, "heads", e.num_heads);
      e.ffn = get_or(m, "ffn", e.ffn);
      e.max_len = get_or(m, "max_len", e.max_len);
      cfg.model.biaffine.arc_dim = get_or(m, "arc_dim", cfg.model.biaffine.arc_dim);
      cfg.model.biaffine.label_dim = get_or(m, "label_dim", cfg.model.biaffine.label_dim);
    }
    cfg.epochs = get_or(j, "epochs", cfg.epochs);
    cfg.batch_size = get_or(j, "batch_size", cfg.batch_size);
    cfg.learning_rate = get_or(j, "learning_rate", cfg.learning_rate);
    cfg.clip_norm = get_or(j, "clip_norm", cfg.clip_norm);
    cfg.seed = get_or(j, "seed", cfg.seed);
    cfg.eval_fraction = get_or(j, "eval_fraction", cfg.eval_fraction);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfigError, e.what());
  }
  cfg.validate();
  return cfg;
}

TrainingConfig TrainingConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), std::filesystem::path(path).parent_path().string());
}

DataSplit load_and_split(const TrainingConfig& config) {
  config.validate();
  DataSplit split;
  for (std::size_t i = 0; i < config.corpora.size(); ++i) {
    const CorpusSpec& spec = config.corpora[i];
    split.corpora.push_back(read_corpus(spec.path, spec.task));
    auto order = all_indices(split.corpora.back());
    Rng rng(config.seed + 7919 * (i + 1));
    shuffle(order, rng);
    const auto n_held = static_cast<std::size_t>(config.eval_fraction *
                                                 static_cast<double>(order.size()));
    std::vector<std::size_t> held(order.begin(), order.begin() + n_held);
    std::vector<std::size_t> train(order.begin() + n_held, order.end());
    std::sort(held.begin(), held.end());
    std::sort(train.begin(), train.end());
    split.heldout.push_back(std::move(held));
    split.train.push_back(std::move(train));
  }
  return split;
}

CorpusMetrics evaluate(const Model& model, const Corpus& corpus,
                       std::span<const std::size_t> indices, const std::string& tag,
                       const Lexicon* lexicon) {
  std::vector<std::size_t> all;
  if (indices.empty()) {
    all = all_indices(corpus);
    indices = all;
  }
  CorpusMetrics m;
  m.tag = tag;
  m.task = corpus.task;
  PredictOptions options;
  options.set_tag(corpus.task, tag);
  options.lexicon = lexicon;
  SpanF1 f1;
  AttachmentScore att;
  for (std::size_t idx : indices) {
    const Sentence& s = corpus.sentences.at(idx);
    const auto ids = model.vocab.encode(s.chars);
    const Decoded d = decode_one(model, corpus.task, s.chars, ids, options);
    switch (corpus.task) {
      case Task::kCws: {
        const auto g = segmentation_items(s.segmentation);
        const auto p = segmentation_items(d.segmentation);
        f1.add(g, p);
        break;
      }
      case Task::kPos: {
        const auto g = tagged_items(s.segmentation, s.pos_tags);
        const auto p = tagged_items(d.segmentation, d.tags);
        f1.add(g, p);
        break;
      }
      case Task::kNer: {
        const auto gold_entities = decode_ner(s.chars, s.labels);
        const auto g = entity_items(gold_entities);
        const auto p = entity_items(d.entities);
        f1.add(g, p);
        break;
      }
      case Task::kDep:
        att.add(s.segmentation, s.heads, s.rels, d.segmentation, d.heads, d.rels);
        break;
    }
    ++m.sentences;
  }
  m.f1 = f1.f1();
  if (corpus.task == Task::kDep) {
    m.uas = att.uas();
    m.las = att.las();
  }
  return m;
}

Model train(const TrainingConfig& config, const EpochCallback& on_epoch) {
  return train(config, load_and_split(config), on_epoch);
}

Model train(const TrainingConfig& config, const DataSplit& data, const EpochCallback& on_epoch) {
  config.validate();
  std::vector<TagSpec> tags;
  for (const auto& spec : config.corpora) {
    auto same = std::find_if(tags.begin(), tags.end(),
                             [&](const TagSpec& t) { return t.name == spec.tag; });
    if (same == tags.end()) {
      tags.push_back({spec.tag, spec.task});
    } else if (same->task != spec.task) {
      throw Error(ErrorCode::kConfigError, "tag '" + spec.tag + "' used for two tasks");
    }
  }

  std::set<std::string> chars, pos_cats, ner_cats, rels;
  for (std::size_t c = 0; c < data.corpora.size(); ++c) {
    const Corpus& corpus = data.corpora[c];
    for (std::size_t idx : data.train[c]) {
      for (const auto& ch : corpus.sentences[idx].chars) chars.insert(ch);
    }
    // Label inventories cover the whole corpus so held-out gold stays in range.
    for (const auto& s : corpus.sentences) {
      if (corpus.task == Task::kPos || corpus.task == Task::kDep) {
        pos_cats.insert(s.pos_tags.begin(), s.pos_tags.end());
      }
      if (corpus.task == Task::kNer) {
        for (const auto& l : s.labels) {
          const auto parts = split_label(l);
          if (parts && parts->positional != Positional::kO) ner_cats.insert(parts->category);
        }
      }
      if (corpus.task == Task::kDep) rels.insert(s.rels.begin(), s.rels.end());
    }
  }

  Rng rng(config.seed);
  Model model = Model::create(config.model, Vocabulary(tags, {chars.begin(), chars.end()}),
                              {pos_cats.begin(), pos_cats.end()},
                              {ner_cats.begin(), ner_cats.end()}, {rels.begin(), rels.end()}, rng);

  std::vector<TrainingSet> sets;
  for (std::size_t c = 0; c < data.corpora.size(); ++c) {
    sets.push_back({&data.corpora[c], &model.vocab.tag(config.corpora[c].tag), data.train[c]});
  }
  BatchSampler sampler(sets, config.batch_size, config.seed + 1);
  OptimizerConfig opt;
  opt.learning_rate = config.learning_rate;
  opt.clip_norm = config.clip_norm;
  Trainer trainer(model, opt);

  const std::size_t steps = sampler.batches_per_epoch();
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    double total = 0.0;
    for (std::size_t s = 0; s < steps; ++s) total += trainer.step(sampler.next());
    EpochReport report;
    report.epoch = epoch;
    report.train_loss = total / static_cast<double>(steps);
    for (std::size_t c = 0; c < data.corpora.size(); ++c) {
      if (data.heldout[c].empty()) continue;
      report.heldout.push_back(
          evaluate(model, data.corpora[c], data.heldout[c], config.corpora[c].tag));
    }
    if (on_epoch) on_epoch(report);
  }
  return model;
}

void finetune(Model& model, const Corpus& data, const std::string& tag_name,
              const FinetuneOptions& options, const EpochCallback& on_epoch) {
  const CorpusTag& tag = model.vocab.tag(tag_name);
  if (tag.task != data.task) {
    throw Error(ErrorCode::kConfigError, "tag '" + tag_name + "' is a " +
                                             std::string(task_name(tag.task)) +
                                             " tag but the corpus is " +
                                             std::string(task_name(data.task)));
  }
  if (data.sentences.empty()) throw Error(ErrorCode::kEmptyInput, "fine-tuning corpus is empty");
  BatchSampler sampler({{&data, &tag, all_indices(data)}}, options.batch_size, options.seed);
  OptimizerConfig opt;
  opt.learning_rate = options.learning_rate;
  opt.clip_norm = options.clip_norm;
  Trainer trainer(model, opt);
  std::vector<ExampleRef> everything;
  for (const auto& s : data.sentences) everything.push_back({&s, &tag});
  const std::size_t steps = sampler.batches_per_epoch();
  for (int epoch = 1; epoch <= options.epochs; ++epoch) {
    for (std::size_t s = 0; s < steps; ++s) trainer.step(sampler.next());
    EpochReport report;
    report.epoch = epoch;
    report.train_loss = mean_loss(model, everything);
    if (on_epoch) on_epoch(report);
  }
}

}  // namespace hanforge
