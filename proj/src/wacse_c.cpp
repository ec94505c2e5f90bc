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

#include "wacse/wacse.h"

#include <filesystem>
#include <fstream>
#include <memory>
#include <new>
#include <string>

#include "alignment.hpp"
#include "checkpoint.hpp"
#include "corpus.hpp"
#include "error.hpp"
#include "evaluation.hpp"
#include "run_config.hpp"
#include "trainer.hpp"
#include "util.hpp"

struct wacse_config {
  wacse::RunConfig config;
};

struct wacse_corpus {
  std::vector<wacse::ParallelPair> pairs;
};

struct wacse_model {
  wacse::Model model;
};

namespace {

thread_local std::string g_last_error;

wacse_status StatusFor(wacse::ErrorKind kind) {
  switch (kind) {
    case wacse::ErrorKind::kNotFound: return WACSE_ERR_NOT_FOUND;
    case wacse::ErrorKind::kConfig: return WACSE_ERR_CONFIG;
    case wacse::ErrorKind::kParse: return WACSE_ERR_PARSE;
    case wacse::ErrorKind::kArgument: return WACSE_ERR_ARGUMENT;
    case wacse::ErrorKind::kRuntime: return WACSE_ERR_RUNTIME;
  }
  return WACSE_ERR_RUNTIME;
}

template <typename F>
wacse_status Guard(F&& body) {
  try {
    body();
    g_last_error.clear();
    return WACSE_OK;
  } catch (const wacse::Error& e) {
    g_last_error = e.what();
    return StatusFor(e.kind());
  } catch (const nlohmann::json::exception& e) {
    g_last_error = e.what();
    return WACSE_ERR_CONFIG;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return WACSE_ERR_RUNTIME;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return WACSE_ERR_RUNTIME;
  }
}

void Require(bool ok, const char* what) {
  if (!ok) throw wacse::ArgumentError(std::string(what) + " must not be null");
}

void EnsureParent(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (parent.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(parent, ec);
  if (ec) throw wacse::RuntimeError("cannot create directory " + parent.string());
}

}  // namespace

extern "C" {

const char* wacse_version(void) { return "0.1.0"; }

const char* wacse_last_error(void) { return g_last_error.c_str(); }

wacse_status wacse_config_default(wacse_config** out) {
  return Guard([&] {
    Require(out, "out");
    *out = new wacse_config{};
  });
}

wacse_status wacse_config_load(const char* path, wacse_config** out) {
  return Guard([&] {
    Require(path && out, "path and out");
    *out = new wacse_config{wacse::LoadRunConfig(path)};
  });
}

wacse_status wacse_config_parse(const char* json, wacse_config** out) {
  return Guard([&] {
    Require(json && out, "json and out");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(json);
    } catch (const nlohmann::json::exception& e) {
      throw wacse::ConfigError(e.what());
    }
    *out = new wacse_config{wacse::RunConfigFromJson(j)};
  });
}

void wacse_config_free(wacse_config* config) { delete config; }

wacse_status wacse_config_save(const wacse_config* config, const char* path) {
  return Guard([&] {
    Require(config && path, "config and path");
    EnsureParent(path);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw wacse::NotFoundError(std::string("cannot write ") + path);
    out << wacse::RunConfigToJson(config->config).dump(2) << '\n';
  });
}

wacse_status wacse_config_validate(const wacse_config* config) {
  return Guard([&] {
    Require(config, "config");
    config->config.Validate();
  });
}

wacse_status wacse_config_set_corpus_seed(wacse_config* config, uint64_t seed) {
  return Guard([&] {
    Require(config, "config");
    config->config.corpus_seed = seed;
  });
}

wacse_status wacse_config_set_train_seed(wacse_config* config, uint64_t seed) {
  return Guard([&] {
    Require(config, "config");
    config->config.train.seed = seed;
  });
}

wacse_status wacse_config_set_threshold(wacse_config* config, double threshold) {
  return Guard([&] {
    Require(config, "config");
    if (!(threshold >= 0.0 && threshold <= 1.0)) {
      throw wacse::ConfigError("threshold must be in [0, 1]");
    }
    config->config.train.threshold = threshold;
  });
}

wacse_status wacse_config_set_weights(wacse_config* config, double alpha,
                                      double beta, double gamma) {
  return Guard([&] {
    Require(config, "config");
    if (!(alpha >= 0.0 && beta >= 0.0 && gamma >= 0.0)) {
      throw wacse::ConfigError("weights must be non-negative");
    }
    config->config.train.weights = {alpha, beta, gamma};
  });
}

wacse_status wacse_config_set_weights_text(wacse_config* config, const char* text) {
  return Guard([&] {
    Require(config && text, "config and text");
    config->config.train.weights = wacse::ParseWeights(text);
  });
}

wacse_status wacse_config_set_lang_embedding(wacse_config* config, int enabled) {
  return Guard([&] {
    Require(config, "config");
    config->config.train.use_language_embedding = enabled != 0;
  });
}

wacse_status wacse_config_set_provider(wacse_config* config, const char* provider) {
  return Guard([&] {
    Require(config && provider, "config and provider");
    config->config.provider = wacse::ParseProviderKind(provider);
  });
}

wacse_status wacse_config_set_alignments_path(wacse_config* config, const char* path) {
  return Guard([&] {
    Require(config && path, "config and path");
    config->config.alignments_path = path;
  });
}

wacse_status wacse_config_set_steps(wacse_config* config, int steps) {
  return Guard([&] {
    Require(config, "config");
    if (steps < 0) throw wacse::ConfigError("steps must be >= 0");
    config->config.train.steps = steps;
  });
}

wacse_status wacse_config_set_output_dir(wacse_config* config, const char* dir) {
  return Guard([&] {
    Require(config && dir, "config and dir");
    config->config.output_dir = dir;
  });
}

const char* wacse_config_output_dir(const wacse_config* config) {
  return config ? config->config.output_dir.c_str() : "";
}

double wacse_config_dev_fraction(const wacse_config* config) {
  return config ? config->config.dev_fraction : 0.0;
}

wacse_status wacse_corpus_generate(const wacse_config* config, wacse_corpus** out) {
  return Guard([&] {
    Require(config && out, "config and out");
    const auto corpus =
        wacse::GenerateCorpus(config->config.corpus, config->config.corpus_seed);
    *out = new wacse_corpus{wacse::Flatten(corpus)};
  });
}

wacse_status wacse_corpus_load(const char* path, wacse_corpus** out) {
  return Guard([&] {
    Require(path && out, "path and out");
    *out = new wacse_corpus{wacse::LoadParallel(path)};
  });
}

wacse_status wacse_corpus_save(const wacse_corpus* corpus, const char* path) {
  return Guard([&] {
    Require(corpus && path, "corpus and path");
    EnsureParent(path);
    wacse::SaveParallel(corpus->pairs, path);
  });
}

void wacse_corpus_free(wacse_corpus* corpus) { delete corpus; }

size_t wacse_corpus_size(const wacse_corpus* corpus) {
  return corpus ? corpus->pairs.size() : 0;
}

size_t wacse_corpus_pair_count(const wacse_corpus* corpus, int src_lang,
                               int tgt_lang) {
  if (!corpus) return 0;
  size_t n = 0;
  for (const auto& p : corpus->pairs) {
    if (p.src.lang == src_lang && p.tgt.lang == tgt_lang) ++n;
  }
  return n;
}

wacse_status wacse_corpus_split(const wacse_corpus* corpus, double dev_fraction,
                                wacse_corpus** train, wacse_corpus** dev) {
  return Guard([&] {
    Require(corpus && train && dev, "corpus, train and dev");
    auto t = std::make_unique<wacse_corpus>();
    auto d = std::make_unique<wacse_corpus>();
    for (const auto& [langs, pairs] : wacse::GroupByLanguagePair(corpus->pairs)) {
      auto split = wacse::SplitCorpus(pairs, dev_fraction);
      t->pairs.insert(t->pairs.end(), split.train.begin(), split.train.end());
      d->pairs.insert(d->pairs.end(), split.dev.begin(), split.dev.end());
    }
    *train = t.release();
    *dev = d.release();
  });
}

wacse_status wacse_align(const wacse_config* config, const wacse_corpus* corpus,
                         double threshold, const char* out_path) {
  return Guard([&] {
    Require(config && corpus && out_path, "config, corpus and out_path");
    if (!(threshold >= 0.0 && threshold <= 1.0)) {
      throw wacse::ConfigError("threshold must be in [0, 1]");
    }
    const auto provider = wacse::MakeProvider(config->config, corpus->pairs);
    const auto alignments = wacse::AlignCorpus(corpus->pairs, provider, threshold);
    EnsureParent(out_path);
    wacse::SaveAlignments(alignments, out_path);
  });
}

wacse_status wacse_train(const wacse_config* config, const wacse_corpus* train,
                         const wacse_corpus* dev, const char* out_dir,
                         wacse_progress_fn progress, void* user,
                         wacse_model** model) {
  return Guard([&] {
    Require(config && train && dev && out_dir, "config, train, dev and out_dir");
    const auto& rc = config->config;
    rc.Validate();
    std::filesystem::create_directories(out_dir);
    const auto provider = wacse::MakeProvider(rc, train->pairs);
    std::function<void(const wacse::MetricsRecord&)> hook;
    if (progress) {
      hook = [&](const wacse::MetricsRecord& r) {
        progress(r.step, r.total, r.dev_metric, user);
      };
    }
    auto result = wacse::Train(rc.train, rc.encoder, rc.split_chars,
                               wacse::GroupByLanguagePair(train->pairs),
                               wacse::GroupByLanguagePair(dev->pairs), provider, hook);
    const std::filesystem::path dir(out_dir);
    wacse::WriteMetricsLog(result.log, (dir / "metrics.tsv").string());
    nlohmann::json meta = {{"best_step", result.best_step},
                           {"dev_metric", result.best_dev_metric}};
    wacse::SaveCheckpoint(result.model, (dir / "model.ckpt").string(), meta);
    if (model) *model = new wacse_model{std::move(result.model)};
  });
}

wacse_status wacse_model_load(const char* path, wacse_model** out) {
  return Guard([&] {
    Require(path && out, "path and out");
    *out = new wacse_model{wacse::LoadCheckpoint(path)};
  });
}

wacse_status wacse_model_save(const wacse_model* model, const char* path) {
  return Guard([&] {
    Require(model && path, "model and path");
    EnsureParent(path);
    wacse::SaveCheckpoint(model->model, path);
  });
}

void wacse_model_free(wacse_model* model) { delete model; }

int wacse_model_dim(const wacse_model* model) {
  return model ? model->model.encoder.config().model_dim : 0;
}

wacse_status wacse_model_embed(const wacse_model* model, int lang,
                               const char* words, double* out) {
  return Guard([&] {
    Require(model && words && out, "model, words and out");
    wacse::Sentence s{lang, {}};
    for (auto w : wacse::SplitWhitespace(words)) s.words.emplace_back(w);
    if (s.words.empty()) throw wacse::ArgumentError("sentence has no words");
    const auto m = wacse::EmbedSentences(model->model.tokenizer,
                                         model->model.encoder, {s});
    for (int i = 0; i < m.cols(); ++i) out[i] = m(0, i);
  });
}

wacse_status wacse_evaluate(const wacse_model* model, const wacse_corpus* corpus,
                            const wacse_config* config, const char* report_path) {
  return Guard([&] {
    Require(model && corpus && report_path, "model, corpus and report_path");
    const wacse::EvalOptions options = config ? config->config.eval : wacse::EvalOptions{};
    const auto report = wacse::Evaluate(
        model->model, wacse::GroupByLanguagePair(corpus->pairs), options);
    EnsureParent(report_path);
    wacse::WriteReport(report, report_path);
  });
}

wacse_status wacse_export_projection(const wacse_model* model,
                                     const wacse_corpus* corpus, int n_words,
                                     uint64_t seed, const char* out_path) {
  return Guard([&] {
    Require(model && out_path, "model and out_path");
    if (n_words < 3) throw wacse::ArgumentError("n_words must be >= 3");
    const auto words =
        corpus ? wacse::SampleWords(corpus->pairs, n_words, seed)
               : wacse::SampleVocabularyWords(model->model.tokenizer, n_words, seed);
    const auto rows = wacse::ProjectWords(model->model, words);
    EnsureParent(out_path);
    wacse::WriteProjection(rows, out_path);
  });
}

}  // extern "C"
