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

#include "trainer.hpp"

#include <cmath>
#include <fstream>
#include <numeric>

#include "error.hpp"
#include "evaluation.hpp"
#include "util.hpp"

namespace wacse {

void TrainConfig::Validate() const {
  if (steps < 0) throw ConfigError("steps must be >= 0");
  if (eval_every < 1) throw ConfigError("eval_every must be >= 1");
  if (steps > 0 && steps < eval_every) throw ConfigError("steps must be >= eval_every");
  if (batch_size < 2) throw ConfigError("batch_size must be >= 2");
  if (!(lr > 0.0)) throw ConfigError("lr must be > 0");
  if (!(weight_decay >= 0.0)) throw ConfigError("weight_decay must be >= 0");
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw ConfigError("threshold must be in [0, 1]");
  }
  if (!(similarity.scale > 0.0)) throw ConfigError("similarity scale must be > 0");
  try {
    weights.Validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("weights: ") + e.what());
  }
}

BatchStream::BatchStream(std::vector<LangPair> langs, std::vector<size_t> sizes,
                         int batch_size, uint64_t seed)
    : langs_(std::move(langs)),
      sizes_(std::move(sizes)),
      batch_size_(batch_size),
      rng_(DeriveSeed(seed, 0xBA7C4)) {
  if (langs_.empty() || langs_.size() != sizes_.size()) {
    throw ArgumentError("BatchStream: need one size per language pair");
  }
  for (size_t s : sizes_) {
    if (s == 0) throw ArgumentError("BatchStream: empty language pair");
  }
  if (batch_size_ < 1) throw ArgumentError("BatchStream: batch_size must be >= 1");
}

BatchStream BatchStream::ForCorpus(const Corpus& corpus, int batch_size,
                                   uint64_t seed) {
  std::vector<LangPair> langs;
  std::vector<size_t> sizes;
  for (const auto& [key, pairs] : corpus) {
    langs.push_back(key);
    sizes.push_back(pairs.size());
  }
  return BatchStream(std::move(langs), std::move(sizes), batch_size, seed);
}

Batch BatchStream::Next() {
  const size_t which = cursor_++ % langs_.size();
  const size_t size = sizes_[which];
  const auto want = static_cast<size_t>(batch_size_);
  Batch batch;
  batch.langs = langs_[which];
  if (want <= size) {
    // Partial Fisher-Yates over an index permutation.
    std::vector<size_t> perm(size);
    std::iota(perm.begin(), perm.end(), 0);
    for (size_t i = 0; i < want; ++i) {
      std::swap(perm[i], perm[i + rng_.Below(size - i)]);
    }
    batch.indices.assign(perm.begin(), perm.begin() + static_cast<long>(want));
  } else {
    for (size_t i = 0; i < want; ++i) batch.indices.push_back(rng_.Below(size));
  }
  return batch;
}

AdamW::AdamW(Encoder& encoder, const TrainConfig& config)
    : encoder_(encoder),
      lr_(config.lr),
      weight_decay_(config.weight_decay),
      beta1_(config.adam_beta1),
      beta2_(config.adam_beta2),
      eps_(config.adam_eps) {
  for (const auto& p : encoder_.parameters()) {
    m_.push_back(ag::Matrix::Zero(p.var.rows(), p.var.cols()));
    v_.push_back(ag::Matrix::Zero(p.var.rows(), p.var.cols()));
  }
}

void AdamW::Step() {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  const auto& params = encoder_.parameters();
  for (size_t i = 0; i < params.size(); ++i) {
    ag::Var var = params[i].var;
    const ag::Matrix g = var.grad();
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * g;
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * g.cwiseProduct(g);
    ag::Matrix& w = var.mutable_value();
    w *= 1.0 - lr_ * weight_decay_;
    w.array() -= lr_ * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + eps_);
  }
}

double DevSimilaritySearch(const Model& model, const Corpus& dev) {
  double sum = 0.0;
  int count = 0;
  for (const auto& [langs, pairs] : dev) {
    if (pairs.size() < 2) continue;
    std::vector<Sentence> src, tgt;
    for (const auto& p : pairs) {
      src.push_back(p.src);
      tgt.push_back(p.tgt);
    }
    sum += RetrievalAccuracy(EmbedSentences(model.tokenizer, model.encoder, src),
                             EmbedSentences(model.tokenizer, model.encoder, tgt))
               .mean;
    ++count;
  }
  if (count == 0) throw ArgumentError("dev set needs a language pair with >= 2 pairs");
  return sum / count;
}

std::vector<PairExample> PrepareExamples(const std::vector<ParallelPair>& pairs,
                                         const Tokenizer& tokenizer,
                                         int max_seq_len,
                                         const AlignmentProvider& provider,
                                         double threshold) {
  std::vector<PairExample> out;
  out.reserve(pairs.size());
  for (const auto& pair : pairs) {
    out.push_back(MakeExample(pair, WordAlign(pair, provider, threshold), tokenizer,
                              max_seq_len));
  }
  return out;
}

TrainResult Train(const TrainConfig& config, EncoderConfig encoder_config,
                  int split_chars, const Corpus& train, const Corpus& dev,
                  const AlignmentProvider& provider,
                  const std::function<void(const MetricsRecord&)>& progress) {
  config.Validate();
  if (train.empty()) throw ArgumentError("training corpus is empty");
  if (dev.empty()) throw ArgumentError("dev corpus is empty");

  const std::vector<ParallelPair> all_train = Flatten(train);
  Tokenizer tokenizer = Tokenizer::Build(all_train, split_chars);
  encoder_config.vocab_size = tokenizer.vocab_size();
  encoder_config.use_language_embedding = config.use_language_embedding;
  if (config.use_language_embedding) {
    int max_lang = 0;
    for (const auto& corpus : {&train, &dev}) {
      for (const auto& [langs, pairs] : *corpus) {
        max_lang = std::max({max_lang, langs.first, langs.second});
      }
    }
    encoder_config.language_count = std::max(encoder_config.language_count, max_lang + 1);
  }

  std::map<LangPair, std::vector<PairExample>> examples;
  for (const auto& [langs, pairs] : train) {
    examples[langs] = PrepareExamples(pairs, tokenizer, encoder_config.max_seq_len,
                                      provider, config.threshold);
  }

  Model model{std::move(tokenizer), Encoder(encoder_config, config.seed)};
  ObjectiveConfig objective;
  objective.weights = config.weights;
  objective.similarity = config.similarity;
  objective.awp_mode = config.awp_mode;

  BatchStream stream = BatchStream::ForCorpus(train, config.batch_size, config.seed);
  auto gather = [&](const Batch& batch) {
    std::vector<PairExample> out;
    out.reserve(batch.indices.size());
    const auto& pool = examples.at(batch.langs);
    for (size_t i : batch.indices) out.push_back(pool[i]);
    return out;
  };
  auto check_finite = [](int step, const BatchLosses& l) {
    if (!std::isfinite(l.tr) || !std::isfinite(l.awp) || !std::isfinite(l.wtr) ||
        !std::isfinite(l.total)) {
      throw RuntimeError("non-finite loss at step " + std::to_string(step) +
                         ": tr=" + FormatDouble(l.tr) + " awp=" + FormatDouble(l.awp) +
                         " wtr=" + FormatDouble(l.wtr) +
                         " total=" + FormatDouble(l.total));
    }
  };

  TrainResult result{Model{model.tokenizer, model.encoder.Clone()}, 0, 0.0, {}};
  auto record = [&](int step, const BatchLosses& losses) {
    MetricsRecord rec{step, losses.tr, losses.awp, losses.wtr, losses.total,
                      DevSimilaritySearch(model, dev)};
    result.log.push_back(rec);
    if (step == 0 || rec.dev_metric > result.best_dev_metric) {
      result.best_dev_metric = rec.dev_metric;
      result.best_step = step;
      result.model.encoder.Restore(model.encoder.Snapshot());
    }
    if (progress) progress(rec);
  };

  {
    // Step 0 reports the untouched model on the first batch.
    BatchStream peek = stream;
    const auto batch = gather(peek.Next());
    ag::NoGradGuard no_grad;
    const BatchLosses losses = ComputeBatchLoss(model.encoder, batch, objective).losses;
    check_finite(0, losses);
    record(0, losses);
  }

  AdamW optimizer(model.encoder, config);
  for (int step = 1; step <= config.steps; ++step) {
    const bool evaluate = step % config.eval_every == 0 || step == config.steps;
    const auto batch = gather(stream.Next());
    model.encoder.ZeroGrad();
    const BatchObjective objective_value =
        ComputeBatchLoss(model.encoder, batch, objective, evaluate);
    check_finite(step, objective_value.losses);
    ag::Backward(objective_value.total);
    optimizer.Step();
    if (evaluate) record(step, objective_value.losses);
  }
  return result;
}

std::string FormatMetricsRecord(const MetricsRecord& r) {
  return std::to_string(r.step) + '\t' + FormatDouble(r.tr) + '\t' +
         FormatDouble(r.awp) + '\t' + FormatDouble(r.wtr) + '\t' +
         FormatDouble(r.total) + '\t' + FormatDouble(r.dev_metric);
}

void WriteMetricsLog(const std::vector<MetricsRecord>& log, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw NotFoundError("cannot write metrics log " + path);
  for (const auto& r : log) out << FormatMetricsRecord(r) << '\n';
  if (!out) throw RuntimeError("write failed for " + path);
}

}  // namespace wacse
