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

#include "hanforge/serialization.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>
#include <zlib.h>

#include "hanforge/error.hpp"

namespace hanforge {

namespace {

using json = nlohmann::json;

constexpr char kMagic[8] = {'H', 'A', 'N', 'F', 'O', 'R', 'G', 'E'};
constexpr std::size_t kHeaderSize = sizeof(kMagic) + 4 + 8;

template <class T>
void put_le(std::string& buf, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    buf.push_back(static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff));
  }
}

template <class T>
T get_le(const std::string& buf, std::size_t pos) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
  }
  return static_cast<T>(v);
}

std::uint32_t checksum(const std::string& buf, std::size_t len) {
  return static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(buf.data()), static_cast<uInt>(len)));
}

json encoder_config_json(const EncoderConfig& c) {
  return {{"layers", c.num_layers}, {"hidden", c.hidden},       {"heads", c.num_heads},
          {"ffn", c.ffn},           {"max_len", c.max_len},     {"vocab_size", c.vocab_size}};
}

struct Parsed {
  json manifest;
  std::string bytes;
  std::size_t data_begin = 0;
  std::size_t data_end = 0;
};

Parsed parse_container(std::string bytes) {
  if (bytes.size() < kHeaderSize + 4 || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw Error(ErrorCode::kCorruptContainer, "not a model container or truncated");
  }
  const auto version = get_le<std::uint32_t>(bytes, sizeof(kMagic));
  if (version != kFormatVersion) {
    throw Error(ErrorCode::kFormatVersionMismatch,
                "container version " + std::to_string(version) + ", expected " +
                    std::to_string(kFormatVersion));
  }
  const std::size_t body = bytes.size() - 4;
  if (checksum(bytes, body) != get_le<std::uint32_t>(bytes, body)) {
    throw Error(ErrorCode::kCorruptContainer, "checksum mismatch");
  }
  const auto manifest_size = get_le<std::uint64_t>(bytes, sizeof(kMagic) + 4);
  if (manifest_size > body - kHeaderSize) {
    throw Error(ErrorCode::kCorruptContainer, "manifest size out of range");
  }
  Parsed p;
  try {
    p.manifest = json::parse(bytes.begin() + kHeaderSize,
                             bytes.begin() + static_cast<std::ptrdiff_t>(kHeaderSize + manifest_size));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kCorruptContainer, std::string("manifest: ") + e.what());
  }
  p.data_begin = kHeaderSize + manifest_size;
  p.data_end = body;
  p.bytes = std::move(bytes);
  return p;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

void write_model(const Model& model, std::ostream& out) {
  json tensors = json::array();
  std::string data;
  ModelParams::visit(model.params, [&](const std::string& name, const Matrix& m) {
    tensors.push_back({{"name", name}, {"shape", {m.rows(), m.cols()}}, {"offset", data.size()}});
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        put_le(data, std::bit_cast<std::uint32_t>(static_cast<float>(m(r, c))));
      }
    }
  });
  json tags = json::array();
  for (const auto& t : model.vocab.tags()) {
    tags.push_back({{"name", t.name}, {"task", task_name(t.task)}});
  }
  const json manifest = {
      {"format_version", kFormatVersion},
      {"config",
       {{"encoder", encoder_config_json(model.config.encoder)},
        {"biaffine",
         {{"arc_dim", model.config.biaffine.arc_dim},
          {"label_dim", model.config.biaffine.label_dim}}}}},
      {"corpus_tags", tags},
      {"chars", model.vocab.chars()},
      {"pos_categories", model.pos_scheme.categories()},
      {"ner_categories", model.ner_scheme.categories()},
      {"relations", model.relations},
      {"tensors", tensors}};

  std::string buf(kMagic, sizeof(kMagic));
  put_le(buf, kFormatVersion);
  const std::string text = manifest.dump();
  put_le(buf, static_cast<std::uint64_t>(text.size()));
  buf += text;
  buf += data;
  put_le(buf, checksum(buf, buf.size()));
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw Error(ErrorCode::kIoError, "write failed");
}

void save_model(const Model& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open " + path + " for writing");
  write_model(model, out);
  out.close();
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path);
}

Model read_model(std::istream& in) {
  Parsed p = parse_container({std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()});
  const json& m = p.manifest;
  try {
    ModelConfig config;
    const json& enc = m.at("config").at("encoder");
    config.encoder.num_layers = enc.at("layers").get<int>();
    config.encoder.hidden = enc.at("hidden").get<int>();
    config.encoder.num_heads = enc.at("heads").get<int>();
    config.encoder.ffn = enc.at("ffn").get<int>();
    config.encoder.max_len = enc.at("max_len").get<int>();
    config.biaffine.arc_dim = m.at("config").at("biaffine").at("arc_dim").get<int>();
    config.biaffine.label_dim = m.at("config").at("biaffine").at("label_dim").get<int>();

    std::vector<TagSpec> tags;
    for (const auto& t : m.at("corpus_tags")) {
      const auto task = parse_task(t.at("task").get<std::string>());
      if (!task) throw Error(ErrorCode::kCorruptContainer, "unknown task in manifest");
      tags.push_back({t.at("name").get<std::string>(), *task});
    }
    // Parameters are overwritten below; the seed only shapes the tensors.
    Rng rng(0);
    Model model = Model::create(config, Vocabulary(tags, m.at("chars").get<std::vector<std::string>>()),
                                m.at("pos_categories").get<std::vector<std::string>>(),
                                m.at("ner_categories").get<std::vector<std::string>>(),
                                m.at("relations").get<std::vector<std::string>>(), rng);
    if (model.config.encoder.vocab_size != enc.at("vocab_size").get<int>()) {
      throw Error(ErrorCode::kCorruptContainer, "vocabulary size mismatch");
    }

    std::map<std::string, const json*> index;
    for (const auto& t : m.at("tensors")) index[t.at("name").get<std::string>()] = &t;
    std::size_t seen = 0;
    ModelParams::visit(model.params, [&](const std::string& name, Matrix& mat) {
      auto it = index.find(name);
      if (it == index.end()) throw Error(ErrorCode::kCorruptContainer, "missing tensor " + name);
      const json& t = *it->second;
      const auto rows = t.at("shape").at(0).get<Eigen::Index>();
      const auto cols = t.at("shape").at(1).get<Eigen::Index>();
      if (rows != mat.rows() || cols != mat.cols()) {
        throw Error(ErrorCode::kCorruptContainer, "shape mismatch for " + name);
      }
      const auto offset = t.at("offset").get<std::size_t>();
      const std::size_t begin = p.data_begin + offset;
      const auto count = static_cast<std::size_t>(rows * cols);
      if (offset > p.data_end - p.data_begin || count * 4 > p.data_end - begin) {
        throw Error(ErrorCode::kCorruptContainer, "tensor " + name + " out of range");
      }
      for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
          const std::size_t pos = begin + 4 * static_cast<std::size_t>(r * cols + c);
          mat(r, c) = std::bit_cast<float>(get_le<std::uint32_t>(p.bytes, pos));
        }
      }
      ++seen;
    });
    if (seen != index.size()) throw Error(ErrorCode::kCorruptContainer, "unexpected tensors");
    return model;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kCorruptContainer, std::string("manifest: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kCorruptContainer) throw;
    throw Error(ErrorCode::kCorruptContainer, e.what());
  }
}

Model load_model(const std::string& path) {
  std::istringstream in(read_file(path));
  return read_model(in);
}

std::string read_manifest(const std::string& path) {
  return parse_container(read_file(path)).manifest.dump(2);
}

}  // namespace hanforge
