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

#include "encoder.hpp"

#include <cmath>

#include "error.hpp"
#include "util.hpp"

namespace wacse {
namespace {

ag::Matrix RandomNormal(Rng& rng, int rows, int cols, double stddev) {
  ag::Matrix m(rows, cols);
  for (ag::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.Normal() * stddev;
  return m;
}

ag::Var Linear(const ag::Var& x, const ag::Var& w, const ag::Var& b) {
  return ag::AddRow(ag::MatMul(x, w), b);
}

}  // namespace

void EncoderConfig::Validate() const {
  if (model_dim < 1) throw ConfigError("model_dim must be >= 1");
  if (heads < 1 || model_dim % heads != 0) {
    throw ConfigError("model_dim must be divisible by heads");
  }
  if (layers < 0) throw ConfigError("layers must be >= 0");
  if (ffn_dim < 1) throw ConfigError("ffn_dim must be >= 1");
  if (max_seq_len < 4) throw ConfigError("max_seq_len must be >= 4");
  if (vocab_size < Tokenizer::kSpecialCount + 1) {
    throw ConfigError("vocab_size too small");
  }
  if (use_language_embedding && language_count < 1) {
    throw ConfigError("language_count must be >= 1 with language embeddings");
  }
  if (!(init_std >= 0.0)) throw ConfigError("init_std must be >= 0");
}

ag::Matrix WordStates(const EncodedSentence& encoded, int word_index) {
  if (word_index < 0 || word_index >= static_cast<int>(encoded.word_spans.size())) {
    throw ArgumentError("word index " + std::to_string(word_index) +
                        " out of range");
  }
  const WordSpan span = encoded.word_spans[word_index];
  return encoded.tokens.middleRows(span.start, span.width());
}

ag::Var Encoder::Add(const std::string& name, ag::Matrix value) {
  ag::Var var = ag::Parameter(std::move(value));
  params_.push_back({name, var});
  return var;
}

Encoder::Encoder(const EncoderConfig& config, uint64_t seed) : config_(config) {
  config_.Validate();
  Rng rng(DeriveSeed(seed, 0xE1C0DE));
  const int d = config_.model_dim;
  const int f = config_.ffn_dim;
  const double std_in = config_.init_std;
  auto ones = [](int n) { return ag::Matrix(ag::Matrix::Ones(1, n)); };
  auto zeros = [](int r, int c) { return ag::Matrix(ag::Matrix::Zero(r, c)); };

  token_ = Add("embeddings.token", RandomNormal(rng, config_.vocab_size, d, std_in));
  position_ =
      Add("embeddings.position", RandomNormal(rng, config_.max_seq_len, d, std_in));
  if (config_.use_language_embedding) {
    language_ = Add("embeddings.language",
                    RandomNormal(rng, config_.language_count, d, std_in));
  }
  norm_gain_ = Add("embeddings.norm.gain", ones(d));
  norm_bias_ = Add("embeddings.norm.bias", zeros(1, d));

  const double std_d = 1.0 / std::sqrt(static_cast<double>(d));
  const double std_f = 1.0 / std::sqrt(static_cast<double>(f));
  for (int l = 0; l < config_.layers; ++l) {
    const std::string p = "layer" + std::to_string(l) + ".";
    Layer layer;
    layer.wq = Add(p + "attention.query.weight", RandomNormal(rng, d, d, std_d));
    layer.bq = Add(p + "attention.query.bias", zeros(1, d));
    layer.wk = Add(p + "attention.key.weight", RandomNormal(rng, d, d, std_d));
    layer.bk = Add(p + "attention.key.bias", zeros(1, d));
    layer.wv = Add(p + "attention.value.weight", RandomNormal(rng, d, d, std_d));
    layer.bv = Add(p + "attention.value.bias", zeros(1, d));
    layer.wo = Add(p + "attention.output.weight", RandomNormal(rng, d, d, std_d));
    layer.bo = Add(p + "attention.output.bias", zeros(1, d));
    layer.norm1_gain = Add(p + "attention.norm.gain", ones(d));
    layer.norm1_bias = Add(p + "attention.norm.bias", zeros(1, d));
    layer.w1 = Add(p + "ffn.in.weight", RandomNormal(rng, d, f, std_d));
    layer.b1 = Add(p + "ffn.in.bias", zeros(1, f));
    layer.w2 = Add(p + "ffn.out.weight", RandomNormal(rng, f, d, std_f));
    layer.b2 = Add(p + "ffn.out.bias", zeros(1, d));
    layer.norm2_gain = Add(p + "ffn.norm.gain", ones(d));
    layer.norm2_bias = Add(p + "ffn.norm.bias", zeros(1, d));
    layers_.push_back(std::move(layer));
  }
  mlm_bias_ = Add("mlm.bias", zeros(1, config_.vocab_size));
}

Encoder Encoder::Clone() const {
  Encoder copy(config_, 0);
  copy.Restore(Snapshot());
  return copy;
}

ag::Var& Encoder::parameter(const std::string& name) {
  for (auto& p : params_) {
    if (p.name == name) return p.var;
  }
  throw ArgumentError("no parameter named " + name);
}

std::vector<ag::Matrix> Encoder::Snapshot() const {
  std::vector<ag::Matrix> out;
  out.reserve(params_.size());
  for (const auto& p : params_) out.push_back(p.var.value());
  return out;
}

void Encoder::Restore(const std::vector<ag::Matrix>& weights) {
  if (weights.size() != params_.size()) {
    throw ArgumentError("Restore: parameter count mismatch");
  }
  for (size_t i = 0; i < weights.size(); ++i) {
    auto& dst = params_[i].var.mutable_value();
    if (dst.rows() != weights[i].rows() || dst.cols() != weights[i].cols()) {
      throw ArgumentError("Restore: shape mismatch for " + params_[i].name);
    }
    dst = weights[i];
  }
}

void Encoder::ZeroGrad() {
  for (auto& p : params_) p.var.ZeroGrad();
}

Encoder::Output Encoder::Forward(std::span<const Tokenized> batch) const {
  if (batch.empty()) throw ArgumentError("Forward: empty batch");
  std::vector<int> ids, positions, langs;
  std::vector<ag::Segment> segments;
  Output out;
  for (const auto& seq : batch) {
    const int len = static_cast<int>(seq.ids.size());
    if (len < 1 || len > config_.max_seq_len) {
      throw ArgumentError("sequence length " + std::to_string(len) +
                          " outside [1, max_seq_len]");
    }
    if (config_.use_language_embedding &&
        (seq.lang < 0 || seq.lang >= config_.language_count)) {
      throw ArgumentError("unknown lang_id " + std::to_string(seq.lang));
    }
    out.offsets.push_back(static_cast<int>(ids.size()));
    segments.push_back({static_cast<int>(ids.size()), len});
    for (int p = 0; p < len; ++p) {
      if (seq.ids[p] < 0 || seq.ids[p] >= config_.vocab_size) {
        throw ArgumentError("token id " + std::to_string(seq.ids[p]) +
                            " out of range");
      }
      ids.push_back(seq.ids[p]);
      positions.push_back(p);
      langs.push_back(seq.lang);
    }
  }

  ag::Var x = ag::Add(ag::GatherRows(token_, ids), ag::GatherRows(position_, positions));
  if (config_.use_language_embedding) {
    x = ag::Add(x, ag::GatherRows(language_, langs));
  }
  x = ag::LayerNorm(x, norm_gain_, norm_bias_, kLayerNormEps);

  for (const auto& layer : layers_) {
    ag::Var q = Linear(x, layer.wq, layer.bq);
    ag::Var k = Linear(x, layer.wk, layer.bk);
    ag::Var v = Linear(x, layer.wv, layer.bv);
    ag::Var attn = ag::SegmentAttention(q, k, v, segments, config_.heads);
    attn = Linear(attn, layer.wo, layer.bo);
    x = ag::LayerNorm(ag::Add(x, attn), layer.norm1_gain, layer.norm1_bias,
                      kLayerNormEps);
    ag::Var h = ag::Gelu(Linear(x, layer.w1, layer.b1));
    h = Linear(h, layer.w2, layer.b2);
    x = ag::LayerNorm(ag::Add(x, h), layer.norm2_gain, layer.norm2_bias,
                      kLayerNormEps);
  }
  out.hidden = x;
  return out;
}

ag::Var Encoder::MlmHead(const ag::Var& hidden_rows) const {
  return ag::AddRow(ag::MatMulNT(hidden_rows, token_), mlm_bias_);
}

EncodedSentence Encoder::Encode(const Tokenized& input) const {
  return std::move(EncodeBatch(std::span<const Tokenized>(&input, 1)).front());
}

std::vector<EncodedSentence> Encoder::EncodeBatch(
    std::span<const Tokenized> batch) const {
  ag::NoGradGuard no_grad;
  const Output out = Forward(batch);
  std::vector<EncodedSentence> encoded;
  encoded.reserve(batch.size());
  for (size_t i = 0; i < batch.size(); ++i) {
    EncodedSentence e;
    e.tokens = out.hidden.value().middleRows(
        out.offsets[i], static_cast<ag::Index>(batch[i].ids.size()));
    e.cls = e.tokens.row(0);
    e.word_spans = batch[i].spans;
    encoded.push_back(std::move(e));
  }
  return encoded;
}

ag::Matrix Encoder::MlmLogits(const Tokenized& masked) const {
  ag::NoGradGuard no_grad;
  const Output out = Forward(std::span<const Tokenized>(&masked, 1));
  return MlmHead(out.hidden).value();
}

}  // namespace wacse
