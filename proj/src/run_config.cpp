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

#include "run_config.hpp"

#include <fstream>
#include <set>

#include "error.hpp"
#include "util.hpp"

namespace wacse {
namespace {

using nlohmann::json;

// Reads optional fields from one JSON object and rejects keys nobody asked
// about.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(Where("") + " must be an object");
  }

  template <typename T>
  void Get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(Where(key) + " has the wrong type");
    }
  }

  const json* Child(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  std::string Where(const std::string& key) const {
    return key.empty() ? path_ : (path_.empty() ? key : path_ + "." + key);
  }

  void Finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError("unknown config key " + Where(key));
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

AwpMode ParseAwpMode(const std::string& text) {
  if (text == "batched") return AwpMode::kBatched;
  if (text == "exact") return AwpMode::kExact;
  throw ConfigError("train.awp_mode must be 'batched' or 'exact'");
}

MiningMode ParseMiningMode(const std::string& text) {
  if (text == "margin") return MiningMode::kMargin;
  if (text == "cosine") return MiningMode::kCosine;
  throw ConfigError("eval.mining_mode must be 'margin' or 'cosine'");
}

}  // namespace

ProviderKind ParseProviderKind(const std::string& text) {
  if (text == "gold") return ProviderKind::kGold;
  if (text == "ibm1") return ProviderKind::kIbm1;
  if (text == "file") return ProviderKind::kFile;
  throw ConfigError("provider must be one of gold, ibm1, file (got '" + text + "')");
}

std::string ProviderKindName(ProviderKind kind) {
  switch (kind) {
    case ProviderKind::kGold: return "gold";
    case ProviderKind::kIbm1: return "ibm1";
    case ProviderKind::kFile: return "file";
  }
  return "gold";
}

LossWeights ParseWeights(const std::string& text) {
  const auto parts = Split(text, ',');
  if (parts.size() != 3) throw ConfigError("weights must be A,B,G");
  LossWeights w;
  try {
    w.alpha = ParseDouble(parts[0], "weights");
    w.beta = ParseDouble(parts[1], "weights");
    w.gamma = ParseDouble(parts[2], "weights");
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  if (!(w.alpha >= 0.0 && w.beta >= 0.0 && w.gamma >= 0.0)) {
    throw ConfigError("weights must be non-negative");
  }
  return w;
}

void RunConfig::Validate() const {
  corpus.Validate();
  if (!(dev_fraction > 0.0 && dev_fraction < 1.0)) {
    throw ConfigError("dev_fraction must be in (0, 1)");
  }
  // vocab_size is filled from the corpus at training time.
  EncoderConfig probe = encoder;
  probe.vocab_size = std::max(probe.vocab_size, Tokenizer::kSpecialCount + 1);
  if (train.use_language_embedding) probe.language_count = std::max(probe.language_count, 1);
  probe.Validate();
  if (split_chars < 2) throw ConfigError("encoder.split_chars must be >= 2");
  train.Validate();
  if (ibm1_iterations < 1) throw ConfigError("ibm1_iterations must be >= 1");
  if (provider == ProviderKind::kFile && alignments_path.empty()) {
    throw ConfigError("provider 'file' needs alignments_path");
  }
  if (eval.mining_k < 1) throw ConfigError("eval.mining_k must be >= 1");
}

RunConfig RunConfigFromJson(const json& j) {
  RunConfig c;
  Section root(j, "");
  root.Get("output_dir", c.output_dir);
  root.Get("dev_fraction", c.dev_fraction);
  root.Get("ibm1_iterations", c.ibm1_iterations);
  root.Get("alignments_path", c.alignments_path);
  std::string provider = ProviderKindName(c.provider);
  root.Get("provider", provider);
  c.provider = ParseProviderKind(provider);

  if (const json* cj = root.Child("corpus")) {
    Section s(*cj, "corpus");
    s.Get("seed", c.corpus_seed);
    s.Get("cipher_seed", c.corpus.cipher_seed);
    s.Get("reorder_prob", c.corpus.reorder_prob);
    s.Get("fertility_prob", c.corpus.fertility_prob);
    s.Get("min_words", c.corpus.min_words);
    s.Get("max_words", c.corpus.max_words);
    s.Get("zipf_exponent", c.corpus.zipf_exponent);
    if (const json* langs = s.Child("languages")) {
      if (!langs->is_array()) throw ConfigError("corpus.languages must be an array");
      c.corpus.languages.clear();
      for (size_t i = 0; i < langs->size(); ++i) {
        Section l((*langs)[i], "corpus.languages[" + std::to_string(i) + "]");
        LanguageSpec spec;
        l.Get("lang", spec.lang);
        l.Get("vocab_size", spec.vocab_size);
        l.Get("pair_count", spec.pair_count);
        l.Finish();
        c.corpus.languages.push_back(spec);
      }
    }
    s.Finish();
  }
  if (const json* ej = root.Child("encoder")) {
    Section s(*ej, "encoder");
    s.Get("model_dim", c.encoder.model_dim);
    s.Get("layers", c.encoder.layers);
    s.Get("heads", c.encoder.heads);
    s.Get("ffn_dim", c.encoder.ffn_dim);
    s.Get("max_seq_len", c.encoder.max_seq_len);
    s.Get("init_std", c.encoder.init_std);
    s.Get("split_chars", c.split_chars);
    s.Finish();
  }
  if (const json* tj = root.Child("train")) {
    Section s(*tj, "train");
    auto& t = c.train;
    s.Get("steps", t.steps);
    s.Get("batch_size", t.batch_size);
    s.Get("lr", t.lr);
    s.Get("weight_decay", t.weight_decay);
    s.Get("eval_every", t.eval_every);
    s.Get("seed", t.seed);
    s.Get("threshold", t.threshold);
    s.Get("use_language_embedding", t.use_language_embedding);
    s.Get("similarity_scale", t.similarity.scale);
    s.Get("bidirectional_tr", t.similarity.bidirectional_tr);
    std::vector<double> weights{t.weights.alpha, t.weights.beta, t.weights.gamma};
    s.Get("weights", weights);
    if (weights.size() != 3) throw ConfigError("train.weights must have 3 entries");
    t.weights = {weights[0], weights[1], weights[2]};
    std::string awp = t.awp_mode == AwpMode::kExact ? "exact" : "batched";
    s.Get("awp_mode", awp);
    t.awp_mode = ParseAwpMode(awp);
    s.Finish();
  }
  if (const json* vj = root.Child("eval")) {
    Section s(*vj, "eval");
    s.Get("mining_k", c.eval.mining_k);
    std::string mode = c.eval.mining_mode == MiningMode::kMargin ? "margin" : "cosine";
    s.Get("mining_mode", mode);
    c.eval.mining_mode = ParseMiningMode(mode);
    s.Get("sts", c.eval.sts);
    s.Get("aligned_words", c.eval.aligned_words);
    s.Get("seed", c.eval.seed);
    s.Finish();
  }
  root.Finish();
  c.Validate();
  return c;
}

json RunConfigToJson(const RunConfig& c) {
  json langs = json::array();
  for (const auto& l : c.corpus.languages) {
    langs.push_back({{"lang", l.lang}, {"vocab_size", l.vocab_size},
                     {"pair_count", l.pair_count}});
  }
  const auto& t = c.train;
  json j;
  j["output_dir"] = c.output_dir;
  j["dev_fraction"] = c.dev_fraction;
  j["provider"] = ProviderKindName(c.provider);
  j["ibm1_iterations"] = c.ibm1_iterations;
  j["alignments_path"] = c.alignments_path;
  j["corpus"] = {{"seed", c.corpus_seed},
                 {"cipher_seed", c.corpus.cipher_seed},
                 {"reorder_prob", c.corpus.reorder_prob},
                 {"fertility_prob", c.corpus.fertility_prob},
                 {"min_words", c.corpus.min_words},
                 {"max_words", c.corpus.max_words},
                 {"zipf_exponent", c.corpus.zipf_exponent},
                 {"languages", langs}};
  j["encoder"] = {{"model_dim", c.encoder.model_dim},
                  {"layers", c.encoder.layers},
                  {"heads", c.encoder.heads},
                  {"ffn_dim", c.encoder.ffn_dim},
                  {"max_seq_len", c.encoder.max_seq_len},
                  {"init_std", c.encoder.init_std},
                  {"split_chars", c.split_chars}};
  j["train"] = {{"steps", t.steps},
                {"batch_size", t.batch_size},
                {"lr", t.lr},
                {"weight_decay", t.weight_decay},
                {"eval_every", t.eval_every},
                {"seed", t.seed},
                {"threshold", t.threshold},
                {"use_language_embedding", t.use_language_embedding},
                {"similarity_scale", t.similarity.scale},
                {"bidirectional_tr", t.similarity.bidirectional_tr},
                {"weights", {t.weights.alpha, t.weights.beta, t.weights.gamma}},
                {"awp_mode", t.awp_mode == AwpMode::kExact ? "exact" : "batched"}};
  j["eval"] = {{"mining_k", c.eval.mining_k},
               {"mining_mode", c.eval.mining_mode == MiningMode::kMargin ? "margin" : "cosine"},
               {"sts", c.eval.sts},
               {"aligned_words", c.eval.aligned_words},
               {"seed", c.eval.seed}};
  return j;
}

AlignmentProvider MakeProvider(const RunConfig& config,
                               const std::vector<ParallelPair>& pairs) {
  switch (config.provider) {
    case ProviderKind::kGold:
      return GoldProvider{};
    case ProviderKind::kIbm1:
      return MakeIbm1Provider(pairs, config.ibm1_iterations);
    case ProviderKind::kFile:
      return FileProvider{LoadAlignments(config.alignments_path)};
  }
  return GoldProvider{};
}

RunConfig LoadRunConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open config " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return RunConfigFromJson(j);
}

}  // namespace wacse
