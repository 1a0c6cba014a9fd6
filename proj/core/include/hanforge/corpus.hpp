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

#ifndef HANFORGE_CORPUS_HPP_
#define HANFORGE_CORPUS_HPP_

#include <cstddef>
#include <istream>
#include <string>
#include <vector>

#include "hanforge/labels.hpp"
#include "hanforge/structures.hpp"

namespace hanforge {

// One annotated sentence. Which fields are filled depends on the task:
// labels for CWS/POS/NER, segmentation for CWS/POS/DEP, pos_tags for
// POS/DEP, heads and rels for DEP.
struct Sentence {
  std::vector<std::string> chars;
  std::vector<std::string> labels;
  Segmentation segmentation;
  std::vector<std::string> pos_tags;
  std::vector<int> heads;
  std::vector<std::string> rels;
  std::size_t line = 0;
};

struct Corpus {
  std::string source;
  Task task = Task::kCws;
  std::vector<Sentence> sentences;
};

// Formats (UTF-8):
//   CWS  one sentence per line, tokens separated by spaces
//   POS  "form<TAB>tag" per line, blank line between sentences
//   NER  "char<TAB>label" per line (BMES-O cross labels), blank line between
//   DEP  "id<TAB>form<TAB>pos<TAB>head<TAB>rel", blank line between
// Any whitespace run is accepted as the column separator. Errors throw
// CorpusFormatError with "source:line: " prefixed.
Corpus parse_corpus(std::istream& in, Task task, const std::string& source);
Corpus read_corpus(const std::string& path, Task task);

}  // namespace hanforge

#endif  // HANFORGE_CORPUS_HPP_
