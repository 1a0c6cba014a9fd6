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

#include "hanforge/corpus.hpp"

#include <charconv>
#include <fstream>

#include "hanforge/convert.hpp"
#include "hanforge/error.hpp"
#include "hanforge/text.hpp"

namespace hanforge {

namespace {

[[noreturn]] void fail(const std::string& source, std::size_t line, const std::string& msg) {
  throw Error(ErrorCode::kCorpusFormatError, source + ":" + std::to_string(line) + ": " + msg);
}

int parse_int(const std::string& s, const std::string& source, std::size_t line) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) fail(source, line, "bad integer '" + s + "'");
  return v;
}

struct Block {
  std::size_t first_line = 0;
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
};

// Groups non-blank lines into blank-separated blocks of whitespace columns.
std::vector<Block> read_blocks(std::istream& in) {
  std::vector<Block> blocks;
  Block cur;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    auto cols = split_whitespace(line);
    if (cols.empty()) {
      if (!cur.rows.empty()) blocks.push_back(std::move(cur));
      cur = Block{};
      continue;
    }
    if (cur.rows.empty()) cur.first_line = n;
    cur.rows.emplace_back(n, std::move(cols));
  }
  if (!cur.rows.empty()) blocks.push_back(std::move(cur));
  return blocks;
}

Sentence tokens_sentence(std::vector<std::string> tokens, std::size_t line) {
  Sentence s;
  s.segmentation = Segmentation::from_tokens(tokens);
  s.chars = s.segmentation.chars();
  s.line = line;
  return s;
}

}  // namespace

Corpus parse_corpus(std::istream& in, Task task, const std::string& source) {
  Corpus corpus{source, task, {}};
  if (task == Task::kCws) {
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
      ++n;
      auto tokens = split_whitespace(line);
      if (tokens.empty()) continue;
      Sentence s = tokens_sentence(std::move(tokens), n);
      s.labels = encode_bmes(s.segmentation);
      corpus.sentences.push_back(std::move(s));
    }
    return corpus;
  }

  for (auto& block : read_blocks(in)) {
    const std::size_t expected_cols = task == Task::kDep ? 5 : 2;
    for (const auto& [line, cols] : block.rows) {
      if (cols.size() != expected_cols) {
        fail(source, line, "expected " + std::to_string(expected_cols) + " columns, found " +
                               std::to_string(cols.size()));
      }
    }
    if (task == Task::kPos) {
      std::vector<std::string> forms, tags;
      for (auto& [line, cols] : block.rows) {
        forms.push_back(cols[0]);
        tags.push_back(cols[1]);
      }
      Sentence s = tokens_sentence(std::move(forms), block.first_line);
      s.pos_tags = std::move(tags);
      s.labels = encode_cross(s.segmentation, s.pos_tags);
      corpus.sentences.push_back(std::move(s));
    } else if (task == Task::kNer) {
      Sentence s;
      s.line = block.first_line;
      for (auto& [line, cols] : block.rows) {
        if (split_chars(cols[0]).size() != 1) fail(source, line, "expected one character");
        s.chars.push_back(cols[0]);
        s.labels.push_back(cols[1]);
      }
      try {
        decode_ner(s.chars, s.labels);
      } catch (const Error& e) {
        fail(source, block.first_line, e.what());
      }
      corpus.sentences.push_back(std::move(s));
    } else {
      std::vector<std::string> forms;
      Sentence s;
      int expected_id = 1;
      for (auto& [line, cols] : block.rows) {
        if (parse_int(cols[0], source, line) != expected_id++) {
          fail(source, line, "token ids must count up from 1");
        }
        forms.push_back(cols[1]);
        s.pos_tags.push_back(cols[2]);
        s.heads.push_back(parse_int(cols[3], source, line));
        s.rels.push_back(cols[4]);
      }
      if (!is_single_root_tree(s.heads)) {
        fail(source, block.first_line, "heads do not form a single-root tree");
      }
      Sentence t = tokens_sentence(std::move(forms), block.first_line);
      t.pos_tags = std::move(s.pos_tags);
      t.heads = std::move(s.heads);
      t.rels = std::move(s.rels);
      corpus.sentences.push_back(std::move(t));
    }
  }
  return corpus;
}

Corpus read_corpus(const std::string& path, Task task) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open corpus '" + path + "'");
  return parse_corpus(in, task, path);
}

}  // namespace hanforge
