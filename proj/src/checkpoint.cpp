// Copyright 2026 The WACSE Lab Authors.
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

#include "checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "error.hpp"

namespace wacse {
namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

constexpr char kMagic[] = "WACSE-CKPT 1\n";
constexpr size_t kMagicSize = sizeof(kMagic) - 1;

}  // namespace

nlohmann::json EncoderConfigToJson(const EncoderConfig& c) {
  return {{"model_dim", c.model_dim},
          {"layers", c.layers},
          {"heads", c.heads},
          {"ffn_dim", c.ffn_dim},
          {"max_seq_len", c.max_seq_len},
          {"vocab_size", c.vocab_size},
          {"use_language_embedding", c.use_language_embedding},
          {"language_count", c.language_count},
          {"init_std", c.init_std}};
}

EncoderConfig EncoderConfigFromJson(const nlohmann::json& j) {
  EncoderConfig c;
  c.model_dim = j.at("model_dim").get<int>();
  c.layers = j.at("layers").get<int>();
  c.heads = j.at("heads").get<int>();
  c.ffn_dim = j.at("ffn_dim").get<int>();
  c.max_seq_len = j.at("max_seq_len").get<int>();
  c.vocab_size = j.at("vocab_size").get<int>();
  c.use_language_embedding = j.at("use_language_embedding").get<bool>();
  c.language_count = j.at("language_count").get<int>();
  c.init_std = j.value("init_std", 0.02);
  return c;
}

void SaveCheckpoint(const Model& model, const std::string& path,
                    const nlohmann::json& metadata) {
  const auto& vocab = model.tokenizer.vocab();
  nlohmann::json header;
  header["config"] = EncoderConfigToJson(model.encoder.config());
  header["split_chars"] = model.tokenizer.split_chars();
  header["vocab"] = std::vector<std::string>(
      vocab.begin() + Tokenizer::kSpecialCount, vocab.end());
  nlohmann::json tensors = nlohmann::json::array();
  for (const auto& p : model.encoder.parameters()) {
    tensors.push_back({{"name", p.name},
                       {"rows", p.var.rows()},
                       {"cols", p.var.cols()}});
  }
  header["tensors"] = tensors;
  header["metadata"] = metadata;
  const std::string text = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw NotFoundError("cannot write checkpoint " + path);
  out.write(kMagic, kMagicSize);
  const uint64_t len = text.size();
  out.write(reinterpret_cast<const char*>(&len), sizeof(len));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const auto& p : model.encoder.parameters()) {
    const auto& m = p.var.value();
    out.write(reinterpret_cast<const char*>(m.data()),
              static_cast<std::streamsize>(m.size() * sizeof(double)));
  }
  if (!out) throw RuntimeError("write failed for " + path);
}

Model LoadCheckpoint(const std::string& path, nlohmann::json* metadata) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError("cannot open checkpoint " + path);
  char magic[kMagicSize];
  in.read(magic, kMagicSize);
  if (!in || std::memcmp(magic, kMagic, kMagicSize) != 0) {
    throw ParseError(path + ": not a checkpoint file");
  }
  uint64_t len = 0;
  in.read(reinterpret_cast<char*>(&len), sizeof(len));
  if (!in || len > (1ULL << 32)) throw ParseError(path + ": corrupt header length");
  std::string text(len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(len));
  if (!in) throw ParseError(path + ": truncated header");

  try {
    const auto header = nlohmann::json::parse(text);
    EncoderConfig config = EncoderConfigFromJson(header.at("config"));
    Tokenizer tokenizer(header.at("vocab").get<std::vector<std::string>>(),
                        header.at("split_chars").get<int>());
    if (tokenizer.vocab_size() != config.vocab_size) {
      throw ParseError("vocabulary size does not match config");
    }
    Encoder encoder(config, 0);
    const auto& tensors = header.at("tensors");
    if (tensors.size() != encoder.parameters().size()) {
      throw ParseError("tensor count does not match config");
    }
    std::vector<ag::Matrix> weights;
    for (size_t i = 0; i < tensors.size(); ++i) {
      const auto& expected = encoder.parameters()[i];
      const auto& t = tensors[i];
      if (t.at("name").get<std::string>() != expected.name ||
          t.at("rows").get<int64_t>() != expected.var.rows() ||
          t.at("cols").get<int64_t>() != expected.var.cols()) {
        throw ParseError("tensor table mismatch at " + expected.name);
      }
      ag::Matrix m(expected.var.rows(), expected.var.cols());
      in.read(reinterpret_cast<char*>(m.data()),
              static_cast<std::streamsize>(m.size() * sizeof(double)));
      if (!in) throw ParseError("truncated tensor data for " + expected.name);
      weights.push_back(std::move(m));
    }
    encoder.Restore(weights);
    if (metadata) *metadata = header.value("metadata", nlohmann::json::object());
    return Model{std::move(tokenizer), std::move(encoder)};
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kParse) throw ParseError(path + ": " + e.what());
    throw;
  }
}

}  // namespace wacse
