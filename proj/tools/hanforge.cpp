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

// hanforge: command-line front end for training, prediction, evaluation,
// compression and inspection of models.

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hanforge/corpus.hpp"
#include "hanforge/error.hpp"
#include "hanforge/lexicon.hpp"
#include "hanforge/pipeline.hpp"
#include "hanforge/serialization.hpp"
#include "hanforge/text.hpp"
#include "hanforge/theseus.hpp"

namespace {

using hanforge::Error;
using hanforge::ErrorCode;
using hanforge::Task;
using json = nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitArgs = 2;
constexpr int kExitModel = 3;
constexpr int kExitInput = 4;

// Errors raised while opening a model map to kExitModel regardless of code.
struct ModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kModelNotLoaded:
    case ErrorCode::kFormatVersionMismatch:
    case ErrorCode::kCorruptContainer:
    case ErrorCode::kUnknownTag:
    case ErrorCode::kBadLayerCount:
    case ErrorCode::kBindingMismatch:
      return kExitModel;
    case ErrorCode::kConfigError:
      return kExitArgs;
    default:
      return kExitInput;
  }
}

hanforge::Model open_model(const std::string& path) {
  if (path.empty()) throw ModelError("no model given (use --model or HANFORGE_MODEL)");
  try {
    return hanforge::load_model(path);
  } catch (const Error& e) {
    throw ModelError(e.what());
  }
}

std::string model_path(const std::string& flag) {
  if (!flag.empty()) return flag;
  const char* env = std::getenv("HANFORGE_MODEL");
  return env ? env : "";
}

Task task_from(const std::string& name) {
  auto t = hanforge::parse_task(name);
  if (!t) throw CLI::ValidationError("--task", "expected CWS, POS, NER or DEP");
  return *t;
}

std::vector<std::string> read_lines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!hanforge::trim(line).empty()) lines.push_back(line);
  }
  return lines;
}

std::vector<std::string> ner_labels(const hanforge::SentenceAnalysis& a, std::size_t n) {
  std::vector<std::string> labels(n, "O");
  for (const auto& e : a.entities) {
    const auto b = e.span.begin, end = e.span.end;
    if (end - b == 1) {
      labels[b] = "S-" + e.category;
      continue;
    }
    labels[b] = "B-" + e.category;
    for (auto i = b + 1; i + 1 < end; ++i) labels[i] = "M-" + e.category;
    labels[end - 1] = "E-" + e.category;
  }
  return labels;
}

void write_plain(std::ostream& out, const hanforge::SentenceAnalysis& a) {
  std::string sep;
  switch (a.task) {
    case Task::kCws:
      for (const auto& w : a.words) out << std::exchange(sep, " ") << w;
      break;
    case Task::kPos:
      for (const auto& p : a.pos) out << std::exchange(sep, " ") << p.word << '/' << p.tag;
      break;
    case Task::kNer:
      for (const auto& e : a.entities) out << std::exchange(sep, " ") << e.text << '/' << e.category;
      break;
    case Task::kDep:
      for (std::size_t i = 0; i < a.dependencies.size(); ++i) {
        const auto& d = a.dependencies[i];
        out << std::exchange(sep, " ") << d.word << '/' << d.pos << '/' << d.head << '/'
            << d.relation;
      }
      break;
  }
  out << '\n';
}

void write_conll(std::ostream& out, const std::string& text, const hanforge::SentenceAnalysis& a) {
  switch (a.task) {
    case Task::kCws:
      for (const auto& w : a.words) out << w << '\n';
      break;
    case Task::kPos:
      for (const auto& p : a.pos) out << p.word << '\t' << p.tag << '\n';
      break;
    case Task::kNer: {
      const auto chars = hanforge::split_chars(text);
      const auto labels = ner_labels(a, chars.size());
      for (std::size_t i = 0; i < chars.size(); ++i) out << chars[i] << '\t' << labels[i] << '\n';
      break;
    }
    case Task::kDep:
      for (std::size_t i = 0; i < a.dependencies.size(); ++i) {
        const auto& d = a.dependencies[i];
        out << i + 1 << '\t' << d.word << '\t' << d.pos << '\t' << d.head << '\t' << d.relation
            << '\n';
      }
      break;
  }
  out << '\n';
}

json to_json(const std::string& text, const hanforge::SentenceAnalysis& a) {
  json j = {{"text", text}, {"task", hanforge::task_name(a.task)}};
  switch (a.task) {
    case Task::kCws:
      j["words"] = a.words;
      break;
    case Task::kPos:
      j["tokens"] = json::array();
      for (const auto& p : a.pos) j["tokens"].push_back({{"word", p.word}, {"tag", p.tag}});
      break;
    case Task::kNer:
      j["entities"] = json::array();
      for (const auto& e : a.entities) {
        j["entities"].push_back({{"text", e.text},
                                 {"category", e.category},
                                 {"begin", e.span.begin},
                                 {"end", e.span.end}});
      }
      break;
    case Task::kDep:
      j["tokens"] = json::array();
      for (const auto& d : a.dependencies) {
        j["tokens"].push_back(
            {{"word", d.word}, {"pos", d.pos}, {"head", d.head}, {"relation", d.relation}});
      }
      break;
  }
  return j;
}

void print_metrics(std::ostream& out, const hanforge::CorpusMetrics& m) {
  out << m.tag << '\t' << hanforge::task_name(m.task) << '\t' << m.sentences;
  if (m.task == Task::kDep) {
    out << "\tUAS=" << std::fixed << std::setprecision(4) << m.uas << "\tLAS=" << m.las;
  } else {
    out << "\tF=" << std::fixed << std::setprecision(4) << m.f1;
  }
  out << std::defaultfloat << '\n';
}

void load_lexicon(hanforge::Lexicon& lex, const std::string& path, double weight) {
  if (!path.empty()) lex = hanforge::Lexicon::load(path);
  lex.set_weight(weight);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hanforge: multi-task Chinese text analysis"};
  app.require_subcommand(1);

  std::string model_flag, task_flag, text, input, tag, dict, format = "plain", config, out_path,
                                                             corpus_path;
  double dict_weight = hanforge::Lexicon::kDefaultWeight;
  std::uint64_t seed = 1;
  bool seed_set = false;
  long phase1 = 0, phase2 = 0;
  int epochs = 5;
  std::size_t batch_size = 16;
  double lr = 1e-3;

  auto* predict = app.add_subcommand("predict", "Analyze sentences (one per line)");
  predict->add_option("-m,--model", model_flag, "Model container (default: $HANFORGE_MODEL)");
  predict->add_option("-t,--task", task_flag, "CWS, POS, NER or DEP")->required();
  auto* text_opt = predict->add_option("--text", text, "Inline sentence");
  predict->add_option("-i,--input", input, "Input file (default: stdin)")->excludes(text_opt);
  predict->add_option("--tag", tag, "Corpus tag, e.g. a segmentation style");
  predict->add_option("--dict,--user-dict", dict, "User dictionary, one word per line");
  predict->add_option("--dict-weight", dict_weight, "Lexicon bias weight");
  predict->add_option("-f,--format", format, "plain, json or conll")
      ->check(CLI::IsMember({"plain", "json", "conll"}));

  auto* train = app.add_subcommand("train", "Train a model from a JSON config");
  train->add_option("-c,--config", config, "Training config")->required();
  train->add_option("-o,--out", out_path, "Output model container")->required();
  train->add_option("--seed", seed, "Override the config seed")
      ->each([&](const std::string&) { seed_set = true; });
  train->add_option("--epochs", epochs, "Override the config epoch count");

  auto* eval = app.add_subcommand("eval", "Score a model on an annotated corpus");
  eval->add_option("-m,--model", model_flag, "Model container (default: $HANFORGE_MODEL)");
  eval->add_option("-t,--task", task_flag, "CWS, POS, NER or DEP")->required();
  eval->add_option("--corpus", corpus_path, "Annotated corpus")->required();
  eval->add_option("--tag", tag, "Corpus tag");
  eval->add_option("--dict,--user-dict", dict, "User dictionary");
  eval->add_option("--dict-weight", dict_weight, "Lexicon bias weight");
  eval->add_option("-f,--format", format, "plain or json")->check(CLI::IsMember({"plain", "json"}));

  auto* compress = app.add_subcommand("compress", "Halve encoder depth by module replacement");
  compress->add_option("--from", model_flag, "Large model container")->required();
  compress->add_option("-o,--out", out_path, "Output model container")->required();
  compress->add_option("-c,--config", config, "Training config listing the corpora")->required();
  compress->add_option("--phase1-steps", phase1, "Replacement steps")->required();
  compress->add_option("--phase2-steps", phase2, "Fine-tuning steps")->required();
  compress->add_option("--seed", seed, "Random seed");
  compress->add_option("--batch-size", batch_size, "Sentences per batch");
  compress->add_option("--lr", lr, "Learning rate");

  auto* finetune = app.add_subcommand("finetune", "Continue training on one corpus");
  finetune->add_option("-m,--model", model_flag, "Model container (default: $HANFORGE_MODEL)");
  finetune->add_option("-t,--task", task_flag, "CWS, POS, NER or DEP")->required();
  finetune->add_option("--corpus", corpus_path, "Annotated corpus")->required();
  finetune->add_option("--tag", tag, "Corpus tag (default: the task's first tag)");
  finetune->add_option("-o,--out", out_path, "Output model container")->required();
  finetune->add_option("--epochs", epochs, "Epochs");
  finetune->add_option("--seed", seed, "Random seed");
  finetune->add_option("--batch-size", batch_size, "Sentences per batch");
  finetune->add_option("--lr", lr, "Learning rate");

  auto* inspect = app.add_subcommand("inspect", "Print a model container's manifest");
  inspect->add_option("-m,--model", model_flag, "Model container (default: $HANFORGE_MODEL)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitArgs;
  }

  try {
    if (*predict) {
      const Task task = task_from(task_flag);
      auto model = std::make_shared<const hanforge::Model>(open_model(model_path(model_flag)));
      std::vector<std::string> sentences;
      if (!text.empty()) {
        sentences.push_back(text);
      } else if (!input.empty()) {
        std::ifstream in(input);
        if (!in) throw Error(ErrorCode::kIoError, "cannot open " + input);
        sentences = read_lines(in);
      } else {
        sentences = read_lines(std::cin);
      }
      if (sentences.empty()) throw Error(ErrorCode::kEmptyInput, "no input sentences");
      hanforge::Lexicon lex;
      load_lexicon(lex, dict, dict_weight);
      hanforge::PredictOptions options;
      if (!tag.empty()) options.set_tag(task, tag);
      options.lexicon = lex.size() > 0 ? &lex : nullptr;
      const auto result = hanforge::predict(*model, sentences, task, options);
      if (format == "json") {
        json arr = json::array();
        for (std::size_t i = 0; i < result.size(); ++i) arr.push_back(to_json(sentences[i], result[i]));
        std::cout << arr.dump() << '\n';
      } else {
        for (std::size_t i = 0; i < result.size(); ++i) {
          if (format == "conll") {
            write_conll(std::cout, sentences[i], result[i]);
          } else {
            write_plain(std::cout, result[i]);
          }
        }
      }
    } else if (*train) {
      auto cfg = hanforge::TrainingConfig::load(config);
      if (seed_set) cfg.seed = seed;
      if (train->count("--epochs")) cfg.epochs = epochs;
      std::cout << "epoch\tloss\ttag\ttask\tsentences\tscore\n";
      const auto model = hanforge::train(cfg, [](const hanforge::EpochReport& r) {
        std::ostringstream loss;
        loss << std::fixed << std::setprecision(6) << r.train_loss;
        if (r.heldout.empty()) std::cout << r.epoch << '\t' << loss.str() << "\t-\t-\t0\t-\n";
        for (const auto& m : r.heldout) {
          std::cout << r.epoch << '\t' << loss.str() << '\t';
          print_metrics(std::cout, m);
        }
        std::cout.flush();
      });
      hanforge::save_model(model, out_path);
      std::cerr << "saved " << out_path << '\n';
    } else if (*eval) {
      const Task task = task_from(task_flag);
      const auto model = open_model(model_path(model_flag));
      const auto corpus = hanforge::read_corpus(corpus_path, task);
      hanforge::Lexicon lex;
      load_lexicon(lex, dict, dict_weight);
      const std::string tag_name =
          !tag.empty() ? tag
                       : (model.vocab.default_tag(task) ? model.vocab.default_tag(task)->name : "");
      if (tag_name.empty()) throw Error(ErrorCode::kUnknownTag, "model has no tag for this task");
      const auto m = hanforge::evaluate(model, corpus, {}, tag_name, lex.size() > 0 ? &lex : nullptr);
      if (format == "json") {
        json j = {{"tag", m.tag}, {"task", hanforge::task_name(m.task)}, {"sentences", m.sentences}};
        if (m.task == Task::kDep) {
          j["uas"] = m.uas;
          j["las"] = m.las;
        } else {
          j["f1"] = m.f1;
        }
        std::cout << j.dump() << '\n';
      } else {
        print_metrics(std::cout, m);
      }
    } else if (*compress) {
      const auto large = open_model(model_flag);
      const auto cfg = hanforge::TrainingConfig::load(config);
      const auto data = hanforge::load_and_split(cfg);
      std::vector<hanforge::TrainingSet> sets;
      for (std::size_t c = 0; c < data.corpora.size(); ++c) {
        sets.push_back({&data.corpora[c], &large.vocab.tag(cfg.corpora[c].tag), data.train[c]});
      }
      hanforge::CompressOptions options;
      options.schedule.phase1_steps = phase1;
      options.schedule.phase2_steps = phase2;
      options.batch_size = batch_size;
      options.optimizer.learning_rate = lr;
      options.seed = seed;
      const auto base = hanforge::compress(
          large, sets, options, [](int phase, long step, double p, double loss) {
            if (step % 50 == 0) {
              std::cerr << "phase " << phase << " step " << step << " p=" << p << " loss=" << loss
                        << '\n';
            }
          });
      hanforge::save_model(base, out_path);
      std::cerr << "saved " << out_path << " (" << base.config.encoder.num_layers << " layers)\n";
    } else if (*finetune) {
      const Task task = task_from(task_flag);
      auto model = open_model(model_path(model_flag));
      const auto corpus = hanforge::read_corpus(corpus_path, task);
      std::string tag_name = tag;
      if (tag_name.empty()) {
        const auto* t = model.vocab.default_tag(task);
        if (!t) throw Error(ErrorCode::kUnknownTag, "model has no tag for this task");
        tag_name = t->name;
      }
      hanforge::FinetuneOptions options;
      options.epochs = epochs;
      options.seed = seed;
      options.batch_size = batch_size;
      options.learning_rate = lr;
      std::cout << "epoch\tloss\n";
      hanforge::finetune(model, corpus, tag_name, options, [](const hanforge::EpochReport& r) {
        std::cout << r.epoch << '\t' << std::fixed << std::setprecision(6) << r.train_loss
                  << std::defaultfloat << '\n';
      });
      hanforge::save_model(model, out_path);
      std::cerr << "saved " << out_path << '\n';
    } else if (*inspect) {
      const std::string path = model_path(model_flag);
      if (path.empty()) throw ModelError("no model given (use --model or HANFORGE_MODEL)");
      try {
        std::cout << hanforge::read_manifest(path) << '\n';
      } catch (const Error& e) {
        throw ModelError(e.what());
      }
    }
  } catch (const ModelError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitModel;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitArgs;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  }
  return kExitOk;
}
