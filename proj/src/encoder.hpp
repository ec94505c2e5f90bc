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

#ifndef WACSE_ENCODER_HPP_
#define WACSE_ENCODER_HPP_

// Small post-norm transformer encoder trained from scratch. Inputs are the
// sum of token, learned absolute position and (optionally) language
// embeddings; the sentence vector is the final hidden state at cls with no
// pooling projection. The masked-token head reuses the token embedding.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "autograd.hpp"
#include "tokenizer.hpp"

namespace wacse {

struct EncoderConfig {
  int model_dim = 64;
  int layers = 2;
  int heads = 4;
  int ffn_dim = 128;
  int max_seq_len = 32;
  int vocab_size = 0;
  bool use_language_embedding = false;
  int language_count = 0;
  double init_std = 0.02;

  void Validate() const;
  bool operator==(const EncoderConfig&) const = default;
};

struct EncodedSentence {
  Eigen::RowVectorXd cls;
  ag::Matrix tokens;  // every position, cls row included
  std::vector<WordSpan> word_spans;
};

// Rows of the word's token span, in order.
ag::Matrix WordStates(const EncodedSentence& encoded, int word_index);

class Encoder {
 public:
  struct NamedParameter {
    std::string name;
    ag::Var var;
  };

  // Hidden states for a batch, stacked; sequence i starts at offsets[i].
  struct Output {
    ag::Var hidden;
    std::vector<int> offsets;
  };

  Encoder(const EncoderConfig& config, uint64_t seed);
  Encoder(Encoder&&) = default;
  Encoder& operator=(Encoder&&) = default;
  Encoder(const Encoder&) = delete;
  Encoder& operator=(const Encoder&) = delete;

  // Independent copy of the weights.
  Encoder Clone() const;

  Output Forward(std::span<const Tokenized> batch) const;

  // Inference-mode helpers; no graph is recorded.
  EncodedSentence Encode(const Tokenized& input) const;
  std::vector<EncodedSentence> EncodeBatch(std::span<const Tokenized> batch) const;
  // Full-vocabulary logits at every position of `masked`.
  ag::Matrix MlmLogits(const Tokenized& masked) const;

  // Logits for selected hidden rows through the tied output layer.
  ag::Var MlmHead(const ag::Var& hidden_rows) const;

  const EncoderConfig& config() const { return config_; }
  const std::vector<NamedParameter>& parameters() const { return params_; }
  ag::Var& parameter(const std::string& name);
  const ag::Var& token_embedding() const { return params_[0].var; }

  std::vector<ag::Matrix> Snapshot() const;
  void Restore(const std::vector<ag::Matrix>& weights);
  void ZeroGrad();

 private:
  struct Layer {
    ag::Var wq, bq, wk, bk, wv, bv, wo, bo;
    ag::Var norm1_gain, norm1_bias;
    ag::Var w1, b1, w2, b2;
    ag::Var norm2_gain, norm2_bias;
  };

  ag::Var Add(const std::string& name, ag::Matrix value);

  EncoderConfig config_;
  std::vector<NamedParameter> params_;
  ag::Var token_, position_, language_, norm_gain_, norm_bias_, mlm_bias_;
  std::vector<Layer> layers_;
};

inline constexpr double kLayerNormEps = 1e-5;

}  // namespace wacse

#endif  // WACSE_ENCODER_HPP_
