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

// wacse command-line driver. Links only against the C library interface.

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "wacse/wacse.h"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitNotFound = 2;
constexpr int kExitConfig = 3;

struct Failure {
  int code;
};

int ExitCodeFor(wacse_status status) {
  switch (status) {
    case WACSE_OK: return 0;
    case WACSE_ERR_NOT_FOUND: return kExitNotFound;
    case WACSE_ERR_CONFIG: return kExitConfig;
    default: return kExitRuntime;
  }
}

void Check(wacse_status status) {
  if (status == WACSE_OK) return;
  std::fprintf(stderr, "wacse: %s\n", wacse_last_error());
  throw Failure{ExitCodeFor(status)};
}

template <typename T, void (*Free)(T*)>
struct Handle {
  T* ptr = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(ptr); }
  T** out() { return &ptr; }
  T* get() const { return ptr; }
};

using Config = Handle<wacse_config, wacse_config_free>;
using Corpus = Handle<wacse_corpus, wacse_corpus_free>;
using Model = Handle<wacse_model, wacse_model_free>;

struct Overrides {
  std::string config_path;
  std::optional<uint64_t> seed;
  std::optional<std::string> provider;
  std::optional<double> threshold;
  std::optional<std::string> weights;
  std::optional<std::string> lang_embedding;
  std::optional<std::string> alignments;
  std::optional<int> steps;
};

void LoadConfig(const Overrides& o, Config& config, bool seed_is_corpus) {
  if (o.config_path.empty()) {
    Check(wacse_config_default(config.out()));
  } else {
    Check(wacse_config_load(o.config_path.c_str(), config.out()));
  }
  wacse_config* c = config.get();
  if (o.seed) {
    Check(seed_is_corpus ? wacse_config_set_corpus_seed(c, *o.seed)
                         : wacse_config_set_train_seed(c, *o.seed));
  }
  if (o.provider) Check(wacse_config_set_provider(c, o.provider->c_str()));
  if (o.threshold) Check(wacse_config_set_threshold(c, *o.threshold));
  if (o.weights) Check(wacse_config_set_weights_text(c, o.weights->c_str()));
  if (o.lang_embedding) {
    Check(wacse_config_set_lang_embedding(c, *o.lang_embedding == "on"));
  }
  if (o.alignments) Check(wacse_config_set_alignments_path(c, o.alignments->c_str()));
  if (o.steps) Check(wacse_config_set_steps(c, *o.steps));
  Check(wacse_config_validate(c));
}

std::string Join(const std::string& dir, const char* name) {
  return (std::filesystem::path(dir) / name).string();
}

void MakeDir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    std::fprintf(stderr, "wacse: cannot create directory %s\n", dir.c_str());
    throw Failure{kExitRuntime};
  }
}

void GenCorpus(const Overrides& o, const std::string& out_dir) {
  Config config;
  LoadConfig(o, config, true);
  MakeDir(out_dir);
  Corpus all, train, dev;
  Check(wacse_corpus_generate(config.get(), all.out()));
  Check(wacse_corpus_split(all.get(), wacse_config_dev_fraction(config.get()),
                           train.out(), dev.out()));
  Check(wacse_corpus_save(all.get(), Join(out_dir, "corpus.tsv").c_str()));
  Check(wacse_corpus_save(train.get(), Join(out_dir, "train.tsv").c_str()));
  Check(wacse_corpus_save(dev.get(), Join(out_dir, "dev.tsv").c_str()));
  Check(wacse_config_save(config.get(), Join(out_dir, "config.json").c_str()));
  std::printf("wrote %zu pairs (%zu train, %zu dev) to %s\n",
              wacse_corpus_size(all.get()), wacse_corpus_size(train.get()),
              wacse_corpus_size(dev.get()), out_dir.c_str());
}

void Align(const Overrides& o, const std::string& corpus_path, double threshold,
           const std::string& out_path) {
  Config config;
  LoadConfig(o, config, true);
  Corpus corpus;
  Check(wacse_corpus_load(corpus_path.c_str(), corpus.out()));
  Check(wacse_align(config.get(), corpus.get(), threshold, out_path.c_str()));
  std::printf("aligned %zu pairs into %s\n", wacse_corpus_size(corpus.get()),
              out_path.c_str());
}

void OnProgress(int step, double total, double dev_metric, void*) {
  std::printf("step %d\tloss %.6f\tdev %.4f\n", step, total, dev_metric);
  std::fflush(stdout);
}

// A corpus directory holds train.tsv and dev.tsv; a single file is split by
// the configured dev fraction; no corpus means generate from the config.
void TrainCorpora(const wacse_config* config, const std::string& corpus_path,
                  Corpus& train, Corpus& dev) {
  if (!corpus_path.empty() && std::filesystem::is_directory(corpus_path)) {
    Check(wacse_corpus_load(Join(corpus_path, "train.tsv").c_str(), train.out()));
    Check(wacse_corpus_load(Join(corpus_path, "dev.tsv").c_str(), dev.out()));
    return;
  }
  Corpus all;
  if (corpus_path.empty()) {
    Check(wacse_corpus_generate(config, all.out()));
  } else {
    Check(wacse_corpus_load(corpus_path.c_str(), all.out()));
  }
  Check(wacse_corpus_split(all.get(), wacse_config_dev_fraction(config), train.out(),
                           dev.out()));
}

void Train(const Overrides& o, const std::string& corpus_path, std::string out_dir,
           bool quiet) {
  Config config;
  LoadConfig(o, config, false);
  if (out_dir.empty()) out_dir = wacse_config_output_dir(config.get());
  if (out_dir.empty()) {
    std::fprintf(stderr, "wacse: no output directory (use --out)\n");
    throw Failure{kExitConfig};
  }
  Corpus train, dev;
  TrainCorpora(config.get(), corpus_path, train, dev);
  MakeDir(out_dir);
  Check(wacse_config_save(config.get(), Join(out_dir, "config.json").c_str()));
  Check(wacse_train(config.get(), train.get(), dev.get(), out_dir.c_str(),
                    quiet ? nullptr : OnProgress, nullptr, nullptr));
  if (!quiet) std::printf("wrote %s\n", Join(out_dir, "model.ckpt").c_str());
}

void Eval(const Overrides& o, const std::string& checkpoint,
          const std::string& corpus_path, const std::string& report) {
  Config config;
  LoadConfig(o, config, false);
  Model model;
  Check(wacse_model_load(checkpoint.c_str(), model.out()));
  Corpus corpus;
  Check(wacse_corpus_load(corpus_path.c_str(), corpus.out()));
  Check(wacse_evaluate(model.get(), corpus.get(), config.get(), report.c_str()));
  std::printf("wrote %s\n", report.c_str());
}

void Export(const Overrides& o, const std::string& checkpoint,
            const std::string& corpus_path, int n_words, const std::string& out) {
  Model model;
  Check(wacse_model_load(checkpoint.c_str(), model.out()));
  Corpus corpus;
  if (!corpus_path.empty()) Check(wacse_corpus_load(corpus_path.c_str(), corpus.out()));
  Check(wacse_export_projection(model.get(), corpus.get(), n_words, o.seed.value_or(0),
                                out.c_str()));
  std::printf("wrote %s\n", out.c_str());
}

void AddConfigFlags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "Run configuration (JSON)");
  cmd->add_option("--seed", o.seed, "Random seed override");
}

void AddTrainingFlags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--provider", o.provider, "Alignment provider")
      ->check(CLI::IsMember({"gold", "ibm1", "file"}));
  cmd->add_option("--threshold", o.threshold, "Alignment score threshold (default 0.9)")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--weights", o.weights, "Loss weights A,B,G (default 0.8,0.1,0.1)");
  cmd->add_option("--lang-embedding", o.lang_embedding,
                  "Add language embeddings (default off)")
      ->check(CLI::IsMember({"on", "off"}));
  cmd->add_option("--alignments", o.alignments, "Alignment file for --provider file");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Word-aligned cross-lingual sentence embedding toolkit"};
  app.require_subcommand(1);
  Overrides o;
  std::string out, corpus, checkpoint, report;
  double threshold = 0.9;
  int n_words = 500;
  bool quiet = false;

  auto* gen = app.add_subcommand("gen-corpus", "Generate a synthetic parallel corpus");
  AddConfigFlags(gen, o);
  gen->add_option("--out", out, "Output directory")->required();

  auto* align = app.add_subcommand("align", "Write word alignments for a corpus");
  AddConfigFlags(align, o);
  align->add_option("--corpus", corpus, "Parallel corpus file")->required();
  align->add_option("--provider", o.provider, "Alignment provider (default gold)")
      ->check(CLI::IsMember({"gold", "ibm1", "file"}));
  align->add_option("--threshold", threshold, "Drop links scored below this (default 0.9)")
      ->check(CLI::Range(0.0, 1.0));
  align->add_option("--alignments", o.alignments, "Input alignments for --provider file");
  align->add_option("--out", out, "Output alignment file")->required();

  auto* train = app.add_subcommand("train", "Train an encoder");
  AddConfigFlags(train, o);
  AddTrainingFlags(train, o);
  train->add_option("--corpus", corpus,
                    "Corpus directory (train.tsv, dev.tsv) or file; generated if omitted");
  train->add_option("--steps", o.steps, "Training steps override");
  train->add_option("--out", out, "Output directory");
  train->add_flag("--quiet", quiet, "No progress output");

  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint");
  AddConfigFlags(eval, o);
  eval->add_option("--checkpoint", checkpoint, "Model checkpoint")->required();
  eval->add_option("--corpus", corpus, "Evaluation corpus file")->required();
  eval->add_option("--report,--out", report, "Report file")->required();

  auto* exp = app.add_subcommand("export-embeddings",
                                 "Export 2-D projections of word embeddings");
  exp->add_option("--seed", o.seed, "Sampling seed");
  exp->add_option("--checkpoint", checkpoint, "Model checkpoint")->required();
  exp->add_option("--corpus", corpus, "Corpus to sample words from (default: vocabulary)");
  exp->add_option("--n-words", n_words, "Number of words (default 500)")
      ->check(CLI::PositiveNumber);
  exp->add_option("--out", out, "Projection file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*gen) {
      GenCorpus(o, out);
    } else if (*align) {
      Align(o, corpus, threshold, out);
    } else if (*train) {
      Train(o, corpus, out, quiet);
    } else if (*eval) {
      Eval(o, checkpoint, corpus, report);
    } else if (*exp) {
      Export(o, checkpoint, corpus, n_words, out);
    }
  } catch (const Failure& f) {
    return f.code;
  }
  return 0;
}
