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

#ifndef WACSE_TRAINER_HPP_
#define WACSE_TRAINER_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "alignment.hpp"
#include "checkpoint.hpp"
#include "corpus.hpp"
#include "objectives.hpp"
#include "util.hpp"

namespace wacse {

struct TrainConfig {
  int steps = 10000;
  int batch_size = 64;
  double lr = 5e-5;
  double weight_decay = 0.01;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int eval_every = 200;
  LossWeights weights;
  uint64_t seed = 42;
  double threshold = kDefaultAlignmentThreshold;
  bool use_language_embedding = false;
  SimilarityOptions similarity;
  AwpMode awp_mode = AwpMode::kBatched;

  // steps == 0 is allowed and skips training.
  void Validate() const;
};

// Pair indices of one batch, all from one language pair.
struct Batch {
  LangPair langs;
  std::vector<size_t> indices;
};

// Round-robin over language pairs in key order. A batch samples without
// replacement when the language pair has at least batch_size pairs and with
// replacement otherwise.
class BatchStream {
 public:
  BatchStream(std::vector<LangPair> langs, std::vector<size_t> sizes,
              int batch_size, uint64_t seed);
  static BatchStream ForCorpus(const Corpus& corpus, int batch_size, uint64_t seed);

  Batch Next();

 private:
  std::vector<LangPair> langs_;
  std::vector<size_t> sizes_;
  int batch_size_;
  size_t cursor_ = 0;
  Rng rng_;
};

// Decoupled weight decay Adam over every parameter of an encoder.
class AdamW {
 public:
  AdamW(Encoder& encoder, const TrainConfig& config);
  void Step();

 private:
  Encoder& encoder_;
  double lr_, weight_decay_, beta1_, beta2_, eps_;
  int64_t t_ = 0;
  std::vector<ag::Matrix> m_, v_;
};

// Per language pair: mean of both retrieval directions; then the macro
// average over language pairs with at least 2 dev pairs.
double DevSimilaritySearch(const Model& model, const Corpus& dev);

struct MetricsRecord {
  int step = 0;
  double tr = 0.0;
  double awp = 0.0;
  double wtr = 0.0;
  double total = 0.0;
  double dev_metric = 0.0;
};

struct TrainResult {
  Model model;  // best checkpoint by dev metric
  int best_step = 0;
  double best_dev_metric = 0.0;
  std::vector<MetricsRecord> log;
};

// Builds vocabulary and encoder from the training corpus and trains.
// `progress` is called after every evaluation.
TrainResult Train(const TrainConfig& config, EncoderConfig encoder_config,
                  int split_chars, const Corpus& train, const Corpus& dev,
                  const AlignmentProvider& provider,
                  const std::function<void(const MetricsRecord&)>& progress = {});

// Tokenizes and aligns every training pair.
std::vector<PairExample> PrepareExamples(const std::vector<ParallelPair>& pairs,
                                         const Tokenizer& tokenizer,
                                         int max_seq_len,
                                         const AlignmentProvider& provider,
                                         double threshold);

std::string FormatMetricsRecord(const MetricsRecord& record);
void WriteMetricsLog(const std::vector<MetricsRecord>& log, const std::string& path);

}  // namespace wacse

#endif  // WACSE_TRAINER_HPP_
